"""Solver knobs, grouped in one immutable config object."""

from dataclasses import dataclass


@dataclass(frozen=True)
class SolverConfig:
    """Desk-scale defaults; every exhaustive or iterative routine takes one of these.

    enumeration_cap     bounds the number of box points any exhaustive verifier
                        or brute-force solve may visit.
    sfm_bruteforce_cap  largest binary ground set the exhaustive set-function
                        minimizer accepts (2**m evaluations).
    wolfe_tol           termination tolerance of the min-norm-point solve,
                        applied to the duality gap and to the squared-norm
                        improvement between major iterations.
    penalty_retries     how often the ring-constrained minimizer doubles its
                        penalty weight before giving up.
    level_budget        cap on the total number of binary level variables a
                        reduction may create (guards against huge bounds).
    certificate_tol     absolute slack used in floating-point certificate
                        inequalities.
    """

    enumeration_cap: int = 1 << 20
    sfm_bruteforce_cap: int = 22
    wolfe_tol: float = 1e-9
    penalty_retries: int = 10
    level_budget: int = 100_000
    certificate_tol: float = 1e-9


DEFAULT_CONFIG = SolverConfig()
