"""LCF-style theorem proving toolkit with a certifying resolution prover."""

from metis_lcf.kernel import (
    PROP,
    UNIVERSE,
    Context,
    FunType,
    KernelError,
    Term,
    Theorem,
    fn,
    root_context,
)

__all__ = [
    "PROP",
    "UNIVERSE",
    "Context",
    "FunType",
    "KernelError",
    "Term",
    "Theorem",
    "fn",
    "root_context",
]
