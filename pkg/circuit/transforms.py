"""
Структурные преобразования схем: перенумерация, порядок выходов, α-перестановки,
бинаризация n-арных гейтов и удаление мёртвых гейтов.

Все функции возвращают новую схему; исходная не меняется.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Mapping, Sequence, Set, Tuple

from .model import Circuit, CircuitError, Edge, GateLabel, Input, Output, Plus, Times


def relabel(c: Circuit, mapping: Mapping[int, int]) -> Circuit:
    """Перенумерация гейтов биекцией old → new. Метки out_k не меняются."""

    if sorted(mapping) != sorted(c.labels) or sorted(mapping.values()) != sorted(c.labels):
        raise CircuitError("relabel mapping must be a permutation of the gate indices")
    gates = tuple(sorted((mapping[idx], label) for idx, label in c.gates))
    edges = tuple(
        sorted((Edge(mapping[e.src], mapping[e.dst], e.alpha) for e in c.edges), key=lambda e: (e.dst, e.alpha))
    )
    return Circuit(gates=gates, edges=edges, declared_class=c.declared_class)


def with_output_order(c: Circuit) -> Circuit:
    """Переназначает метки out_k по возрастанию индекса выходного гейта."""

    labels = dict(c.labels)
    for k, idx in enumerate(sorted(c.output_gates), 1):
        labels[idx] = Output(k)
    return Circuit(gates=tuple(sorted(labels.items())), edges=c.edges, declared_class=c.declared_class)


def canonicalize(c: Circuit) -> Circuit:
    """
    Переставляет индексы выходных гейтов так, чтобы они возрастали вместе с k.

    Функция схемы сохраняется: выход out_k остаётся тем же выходом.
    """

    outputs = sorted(c.output_gates)
    by_label = sorted(outputs, key=lambda idx: c.labels[idx].k)
    mapping = {idx: idx for idx in c.labels}
    mapping.update(dict(zip(by_label, outputs)))
    return relabel(c, mapping)


def permute_alpha(c: Circuit, gate: int, order: Sequence[int]) -> Circuit:
    """order[j] — старое α ребра, которое получает новое α = j+1."""

    fan_in = c.fan_in(gate)
    if sorted(order) != list(range(1, fan_in + 1)):
        raise CircuitError(f"order must permute 1..{fan_in} for gate {gate}")
    new_alpha = {old: new for new, old in enumerate(order, 1)}
    edges = tuple(
        sorted(
            (Edge(e.src, e.dst, new_alpha[e.alpha]) if e.dst == gate else e for e in c.edges),
            key=lambda e: (e.dst, e.alpha),
        )
    )
    return Circuit(gates=c.gates, edges=edges, declared_class=c.declared_class)


def compact(labels: Mapping[int, GateLabel], edges: Iterable[Tuple[int, int]], declared_class: str) -> Circuit:
    """
    Собирает корректно пронумерованную схему из произвольного набора гейтов.

    edges — пары (src, dst) в порядке α; индексы сжимаются в 1..|V| с сохранением порядка,
    метки входов и выходов перенумеровываются по возрастанию.
    """

    order = sorted(labels)
    renumber = {old: new for new, old in enumerate(order, 1)}
    inputs = sorted((label.k, idx) for idx, label in labels.items() if isinstance(label, Input))
    input_k = {idx: k for k, (_, idx) in enumerate(inputs, 1)}
    outputs = sorted(idx for idx, label in labels.items() if isinstance(label, Output))
    output_k = {idx: k for k, idx in enumerate(outputs, 1)}

    gates: List[Tuple[int, GateLabel]] = []
    for old in order:
        label = labels[old]
        if isinstance(label, Input):
            label = Input(input_k[old])
        elif isinstance(label, Output):
            label = Output(output_k[old])
        gates.append((renumber[old], label))

    counters: Dict[int, int] = {}
    new_edges: List[Edge] = []
    for src, dst in edges:
        if src not in renumber or dst not in renumber:
            continue
        counters[dst] = counters.get(dst, 0) + 1
        new_edges.append(Edge(renumber[src], renumber[dst], counters[dst]))
    new_edges.sort(key=lambda e: (e.dst, e.alpha))
    return Circuit(gates=tuple(gates), edges=tuple(new_edges), declared_class=declared_class)


def ordered_edges(c: Circuit) -> List[Tuple[int, int]]:
    return [(e.src, e.dst) for e in sorted(c.edges, key=lambda e: (e.dst, e.alpha))]


def prune(c: Circuit) -> Circuit:
    """Удаляет гейты, не влияющие ни на один выход. Входные гейты остаются все."""

    reached: Set[int] = set()
    stack = list(c.output_gates)
    while stack:
        idx = stack.pop()
        if idx in reached:
            continue
        reached.add(idx)
        stack.extend(c.predecessors[idx])
    labels = {idx: c.labels[idx] for idx in reached | set(c.input_gates)}
    return compact(labels, ordered_edges(c), c.declared_class)


def binarize(c: Circuit) -> Circuit:
    """
    Заменяет Plus/Times с fan-in > 2 сбалансированными бинарными деревьями.

    Новые гейты получают индексы после существующих; результат объявляется bounded.
    """

    labels: Dict[int, GateLabel] = dict(c.labels)
    pairs: List[Tuple[int, int]] = []
    next_idx = c.size + 1

    def tree(leaves: List[int], label: GateLabel) -> int:
        nonlocal next_idx
        if len(leaves) == 1:
            return leaves[0]
        middle = (len(leaves) + 1) // 2
        left, right = tree(leaves[:middle], label), tree(leaves[middle:], label)
        idx = next_idx
        next_idx += 1
        labels[idx] = label
        pairs.extend([(left, idx), (right, idx)])
        return idx

    for idx in sorted(c.labels):
        label = c.labels[idx]
        preds = list(c.predecessors[idx])
        if isinstance(label, (Plus, Times)) and len(preds) > 2:
            middle = (len(preds) + 1) // 2
            left, right = tree(preds[:middle], label), tree(preds[middle:], label)
            pairs.extend([(left, idx), (right, idx)])
        else:
            pairs.extend((p, idx) for p in preds)
    return compact(labels, pairs, "bounded")
