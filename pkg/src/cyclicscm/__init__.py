"""Discrete structural causal models with feedback cycles.

Exact (rational-arithmetic) induced distributions, graphical separation on
possibly-cyclic graphs, conditional-independence checking, update-schedule
dynamics, and soundness audits that compare the two notions.
"""

from .audit import AuditRecord, MineFinding, MinerConfig, audit_soundness, enumerate_queries, mine, violations
from .dist import CiQuery, JointDist, UndefinedConditionalError, ci_holds, marginal, prob
from .dynamics import (
    ConvergenceReport,
    Schedule,
    find_valid_schedule,
    schedule_converges,
    sweep,
)
from .fixtures import fixture, fixture_names
from .generate import random_scm
from .graphs import (
    DiGraph,
    SepQuery,
    UGraph,
    ancestors,
    ancestral_restriction,
    d_separated,
    is_acyclic,
    moralize,
    separated,
    topological_order,
)
from .modelfile import ModelValidationError, ParseError, parse_model, serialize_model
from .scm import (
    Add,
    Const,
    Disturbance,
    Equation,
    Expr,
    ExprEquation,
    ModelTooLargeError,
    Mul,
    NonUniqueModelError,
    OwnU,
    Scm,
    TableEquation,
    UniquenessReport,
    Var,
    Variable,
    check_uniqueness,
    consistent_solutions,
    eval_equation,
    forward_solution,
    induced_joint,
    iter_noise_assignments,
    satisfies,
    unique_solution,
)

__version__ = "0.1.0"
