"""
Преобразования скоров (id, avg, hardleft, hardright) и пулинг WS / WP.

Внутри исполнителя веса разреженные: список (позиция, ненулевой вес) по возрастанию позиций.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

from numerics import lean_rational

from .specs import EngineError, PoolingSpec

Vector = Tuple[Fraction, ...]
Weights = List[Tuple[int, Fraction]]


def argmax_set(a: Sequence[Fraction]) -> List[int]:
    """M — позиции, на которых достигается максимум."""

    if not a:
        raise EngineError("score transform of an empty sequence")
    best = max(a)
    return [i for i, value in enumerate(a) if value == best]


def transform_support(name: str, chosen: Sequence[int]) -> Weights:
    """Ненулевые веса avg / hardleft / hardright по множеству максимумов M (по возрастанию)."""

    if name == "avg":
        if len(chosen) == 1:
            return [(chosen[0], 1)]
        share = Fraction(1, len(chosen))
        return [(i, share) for i in chosen]
    if name == "hardleft":
        return [(chosen[0], 1)]
    if name == "hardright":
        return [(chosen[-1], 1)]
    raise EngineError(f"unknown score transform {name!r}")


def score_transform(name: str, a: Sequence[Fraction]) -> List[Fraction]:
    """
    f(a) для f ∈ {id, avg, hardleft, hardright}.

    avg: 1/|M| на M, иначе 0; hardleft / hardright: единица в min M / max M.
    """

    if not a:
        raise EngineError("score transform of an empty sequence")
    if name == "id":
        return [Fraction(x) for x in a]
    weights = [Fraction(0)] * len(a)
    for i, w in transform_support(name, argmax_set(a)):
        weights[i] = Fraction(w)
    return weights


def pool_weighted(family: str, X: Sequence[Sequence], weights: Weights) -> tuple:
    """
    WS / WP по разреженным весам.

    WS: Σ w_i · X_i; равные веса выносятся за сумму. WP: покомпонентное ∏ w_i · X_i,
    пустое произведение — вектор из единиц.
    """

    dim = len(X[0])
    if family == "WS":
        if not weights:
            return (0,) * dim
        if len(weights) == 1:
            j, w = weights[0]
            return tuple(X[j]) if w == 1 else tuple(lean_rational(w * x) for x in X[j])
        share = weights[0][1]
        if all(w == share for _, w in weights):
            total = [sum(column) for column in zip(*(X[j] for j, _ in weights))]
            if share == 1:
                return tuple(lean_rational(x) for x in total)
            return tuple(lean_rational(share * x) for x in total)
        acc = [0] * dim
        for j, w in weights:
            vec = X[j]
            for c in range(dim):
                acc[c] += w * vec[c]
        return tuple(lean_rational(x) for x in acc)

    acc = [1] * dim
    for j, w in weights:
        vec = X[j]
        for c in range(dim):
            acc[c] *= vec[c] if w == 1 else w * vec[c]
    return tuple(lean_rational(x) for x in acc)


def pool(spec: PoolingSpec, X: Sequence[Sequence[Fraction]], a: Sequence[Fraction]) -> Vector:
    """
    WS: Σ f(a)_i · X_i. WP: покомпонентное произведение f(a)_i · X_i по i с f(a)_i ≠ 0;
    пустое произведение — вектор из единиц.
    """

    if len(X) != len(a):
        raise EngineError(f"pooling got {len(X)} vectors and {len(a)} scores")
    if not X:
        raise EngineError("pooling of an empty sequence")
    weights = [(j, w) for j, w in enumerate(score_transform(spec.transform, a)) if w != 0]
    return tuple(Fraction(x) for x in pool_weighted(spec.family, X, weights))
