"""Capacity-distortion bounds for two-transmitter sensing channels.

A library plus CLI for evaluating inner (achievable) and outer (converse)
bounds on the rate-distortion region of memoryless two-user multiple
access channels whose echo feedback doubles as a sensing signal, over
finite alphabets.
"""

from .channels import (
    DistortionFn,
    IsacChannel,
    assemble_joint,
    build_example,
    hamming,
    uniform_inputs,
)
from .errors import IsacError
from .estimator import EstimatorMap, expected_distortion, optimal_estimator
from .inner import (
    AuxScheme,
    RatePolygon,
    RegionPoint,
    eval_inner_awk,
    eval_inner_our,
    pareto_frontier,
    sweep_example4,
)
from .outer import (
    AlphaParams,
    OuterScheme,
    composite_omega,
    eval_outer_khkc,
    eval_outer_our,
    example4_outer_closed_form,
    sweep_example4_outer,
)
from .prob import Alphabet, CondKernel, JointDist, chain, condition, entropy, marginalize, mutual_info
from .rd import RdCurvePoint, RdProblem, brute_force_rd, rd_curve, rd_function
from .specfile import parse_channel_spec, serialize_channel_spec

__version__ = "0.1.0"

__all__ = [
    "Alphabet", "AlphaParams", "AuxScheme", "CondKernel", "DistortionFn",
    "EstimatorMap", "IsacChannel", "IsacError", "JointDist", "OuterScheme",
    "RatePolygon", "RdCurvePoint", "RdProblem", "RegionPoint",
    "assemble_joint", "brute_force_rd", "build_example", "chain",
    "composite_omega", "condition", "entropy", "eval_inner_awk",
    "eval_inner_our", "eval_outer_khkc", "eval_outer_our",
    "example4_outer_closed_form", "expected_distortion", "hamming",
    "marginalize", "mutual_info", "optimal_estimator", "pareto_frontier",
    "parse_channel_spec", "rd_curve", "rd_function", "serialize_channel_spec",
    "sweep_example4", "sweep_example4_outer", "uniform_inputs",
]
