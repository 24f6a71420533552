"""Numerics for the GL(4) Kuznetsov trace formula.

Submodules: ``params``, ``special``, ``whittaker``, ``testfn``,
``zeroset``, ``kloosterman``, ``intbounds``, ``eisenstein``, ``verify``,
``emit`` and ``cli``.
"""

__version__ = "0.1.0"

from .errors import BudgetExceeded  # noqa: E402
from .params import LanglandsParam, SpectralParam, WeylElement, as_langlands, weyl_element  # noqa: E402

__all__ = ["BudgetExceeded", "LanglandsParam", "SpectralParam", "WeylElement", "as_langlands", "weyl_element",
           "__version__"]
