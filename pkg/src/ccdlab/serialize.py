"""Flat text serialization of problem instances.

Layout (whitespace-separated decimal floats, one logical record per line):

    quadratic n d m          |  sigmoid n d m
    d_1 ... d_m              |  d_1 ... d_m
    then per component i:    |  then n row lines of d floats,
      d matrix rows,         |  then one line of n labels (+-1)
      one linear-term line,  |
      one constant line      |

Floats are written with 17 significant digits, so values round-trip exactly.
Only the mathematical content is stored; generator metadata (e.g. the box
recommendation) is not part of the format.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .blocks import BlockPartition
from .problems import QuadraticFiniteSum, SigmoidClassification


def _fmt_line(values) -> str:
    return " ".join(f"{float(v):.17g}" for v in np.atleast_1d(values))


def save_instance(prob, path) -> None:
    path = Path(path)
    part = prob.partition
    lines = []
    if isinstance(prob, QuadraticFiniteSum):
        lines.append(f"quadratic {prob.n} {part.dim} {part.num_blocks}")
        lines.append(" ".join(str(s) for s in part.block_sizes))
        for i in range(prob.n):
            for row in prob.quad[i]:
                lines.append(_fmt_line(row))
            lines.append(_fmt_line(prob.lin[i]))
            lines.append(_fmt_line(prob.const[i]))
    elif isinstance(prob, SigmoidClassification):
        lines.append(f"sigmoid {prob.n} {part.dim} {part.num_blocks}")
        lines.append(" ".join(str(s) for s in part.block_sizes))
        for row in prob.rows:
            lines.append(_fmt_line(row))
        lines.append(_fmt_line(prob.labels))
    else:
        raise TypeError(f"cannot serialize {type(prob)!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_instance(path):
    path = Path(path)
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty instance file")
    head = lines[0].split()
    if len(head) != 4:
        raise ValueError(f"{path}: malformed header {lines[0]!r}")
    family, n, d, m = head[0], int(head[1]), int(head[2]), int(head[3])
    sizes = tuple(int(tok) for tok in lines[1].split())
    if len(sizes) != m or sum(sizes) != d:
        raise ValueError(f"{path}: block sizes {sizes} do not match header")
    part = BlockPartition(sizes)
    body = lines[2:]

    def parse(line):
        return np.array([float(tok) for tok in line.split()], dtype=float)

    if family == "quadratic":
        expect = n * (d + 2)
        if len(body) != expect:
            raise ValueError(f"{path}: expected {expect} data lines, found {len(body)}")
        quad = np.empty((n, d, d))
        lin = np.empty((n, d))
        const = np.empty(n)
        pos = 0
        for i in range(n):
            for r in range(d):
                quad[i, r] = parse(body[pos])
                pos += 1
            lin[i] = parse(body[pos])
            pos += 1
            const[i] = float(body[pos])
            pos += 1
        return QuadraticFiniteSum(quad, lin, const, part)
    if family == "sigmoid":
        expect = n + 1
        if len(body) != expect:
            raise ValueError(f"{path}: expected {expect} data lines, found {len(body)}")
        rows = np.stack([parse(body[i]) for i in range(n)])
        labels = parse(body[n])
        return SigmoidClassification(rows, labels, part)
    raise ValueError(f"{path}: unknown family {family!r}")
