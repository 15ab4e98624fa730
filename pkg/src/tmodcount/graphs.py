"""Analytic sets built from T-module exponentials."""

from __future__ import annotations

from .counting import AnalyticSetSpec
from .expmap import exp_coeffs
from .hensel import AnalyticMap
from .localfield import laurent
from .series import Series
from .tmodule import MARGIN, TModule


def exp_series_map(M: TModule, N: int) -> AnalyticMap:
    """x -> (x, e(x)) for a one-dimensional module, e truncated after e_N."""
    if M.m != 1:
        raise ValueError("exponential graphs are built for one-dimensional modules")
    E = exp_coeffs(M, N)
    one = M.T.one()
    x = Series.variable(1, 0, one)
    terms = {(M.q**n,): E[n][0][0] for n in range(N + 1)}
    return AnalyticMap([x, Series(1, terms)])


def adequate_truncation(M: TModule, N: int, precision: int) -> int:
    """Smallest N' >= N whose first omitted term e_{N'+1} x^(q^(N'+1)) is
    below precision + MARGIN on the closed unit disc."""
    n = N
    while True:
        E = exp_coeffs(M, n + 1)
        if E[n + 1][0][0].valuation_inf() >= precision + MARGIN:
            return n
        n += 1


def exp_graph(M: TModule, truncation: int = 4, label: str = "") -> AnalyticSetSpec:
    """Graph of the exponential of M over B_1 in F_q((1/T))^2."""
    K = laurent(M.q)

    def build(precision: int) -> AnalyticMap:
        return exp_series_map(M, adequate_truncation(M, truncation, precision))

    return AnalyticSetSpec("image", K, 2, 1, build, graph=True, label=label or f"exp graph of {M.label}")
