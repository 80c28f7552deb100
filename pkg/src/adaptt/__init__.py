"""A dependent type theory with first-class structural type casts.

Subpackages: ``syntax`` (raw terms and contexts), ``normalize`` (the
rewrite engine and conversion), ``transform`` (functorial actions and the
2-cell calculus), ``inductive`` (datatype signatures and derived cast
rules), ``check`` (well-formedness), ``surface`` (concrete syntax),
``setmodel`` (finite-set semantic oracle), ``cli``.
"""

from . import inductive as _inductive

_inductive.install_builtins()
