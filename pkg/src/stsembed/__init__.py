"""Steiner triple systems: subsystems, coset-safe doubling and embeddings
that create no new subsystems."""

from .core import (Block, LeaveGraph, PartialSTS, glue_injection, glued_union, is_admissible,
                   leave_graph, make_partial_system, pad, quasigroup_op, relabel)
from .doubling import (DoublingResult, SixCycle, VerificationReport, counting_audit, double,
                       extend_bijection, find_six_cycle, initial_injection, verify_doubling)
from .embedding import (AmalgamationProblem, EmbeddingPlan, EmbeddingRun, amalgamate,
                        find_good_witness, padding_order, plan_embedding, run_embedding,
                        six_cycle_decomposition)
from .errors import STSError
from .generators import (affine_triple_system, bose, partial_with_hexagon_leave,
                         projective_triple_system, random_partial, random_sts, skolem)
from .subsystems import (are_isomorphic, canonical_form, class_violations, closure,
                         enumerate_subsystems, is_class_free, is_subsystem_free,
                         new_subsystem_violations, unique_small_subsystem)

__version__ = "0.1.0"
