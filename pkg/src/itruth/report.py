"""Deterministic reports: plain-text tables, a line-delimited machine mirror,
and figures rendered alongside them.

Reports embed the run configuration that produced them, and their byte
content is a pure function of it: no timestamps, all collections sorted or
emitted in canonical order.  Figures (iteration traces, audit summaries,
order diagrams) are written next to the delimited output when an output
directory is given.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .kripke import KripkeStructure


def render_text(rows: Sequence[Mapping], columns: Sequence[str]) -> str:
    """Fixed-column plain text table."""
    widths = {c: len(c) for c in columns}
    cells = []
    for row in rows:
        line = {c: _cell(row.get(c, "")) for c in columns}
        cells.append(line)
        for c in columns:
            widths[c] = max(widths[c], len(line[c]))
    out = ["  ".join(c.ljust(widths[c]) for c in columns)]
    out.append("  ".join("-" * widths[c] for c in columns))
    for line in cells:
        out.append("  ".join(line[c].ljust(widths[c]) for c in columns))
    return "\n".join(out) + "\n"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, frozenset):
        return "{" + ",".join(str(x) for x in sorted(v)) + "}"
    return str(v)


def render_jsonl(records: Iterable[Mapping]) -> str:
    lines = []
    for rec in records:
        lines.append(json.dumps(_jsonable(rec), sort_keys=True, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def _jsonable(v):
    if isinstance(v, Mapping):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (set, frozenset)):
        return sorted(_jsonable(x) for x in v)
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    return str(v)


def write_report(
    outdir: str | Path,
    stem: str,
    config: Mapping,
    rows: Sequence[Mapping],
    columns: Sequence[str],
    figures: Sequence[tuple[str, "object"]] = (),
) -> list[Path]:
    """Write stem.txt, stem.jsonl and any figures; returns written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    text = render_text(rows, columns)
    header = "config: " + json.dumps(_jsonable(config), sort_keys=True) + "\n\n"
    p = outdir / f"{stem}.txt"
    p.write_text(header + text)
    paths.append(p)
    records = [{"kind": "config", **_jsonable(config)}] + [dict(r) for r in rows]
    p = outdir / f"{stem}.jsonl"
    p.write_text(render_jsonl(records))
    paths.append(p)
    for name, fig in figures:
        p = outdir / f"{stem}_{name}.png"
        fig.savefig(p, dpi=110)
        _close(fig)
        paths.append(p)
    return paths


def _close(fig) -> None:
    import matplotlib.pyplot as plt

    plt.close(fig)


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


# ---------------------------------------------------------------------------
# Figures


def fig_trace(sizes: Sequence[int], title: str):
    """Iteration trace: how the fixed-point candidate grows until stable."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.step(range(len(sizes)), sizes, where="post", marker="o")
    ax.set_xlabel("iteration")
    ax.set_ylabel("members")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def fig_check_summary(rows: Sequence[Mapping], title: str):
    """Per-check pass/fail counts as a horizontal bar chart."""
    plt = _plt()
    groups: dict[str, list[int]] = {}
    for r in rows:
        name = str(r.get("check", r.get("axiom", "check")))
        ok = bool(r.get("ok", r.get("pass", False)))
        g = groups.setdefault(name, [0, 0])
        g[0 if ok else 1] += 1
    names = sorted(groups)
    passes = [groups[n][0] for n in names]
    fails = [groups[n][1] for n in names]
    fig, ax = plt.subplots(figsize=(6, 0.4 * len(names) + 1.4))
    ax.barh(names, passes, color="#2a9d8f", label="pass")
    ax.barh(names, fails, left=passes, color="#e76f51", label="fail")
    ax.set_xlabel("instances")
    ax.set_title(title)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    return fig


def fig_structure(m: KripkeStructure, title: str = "structure"):
    """Order diagram of a structure, worlds annotated with interpretation sizes."""
    plt = _plt()
    ranks: dict[str, int] = {}
    for w in m.worlds:
        ranks[w] = sum(1 for v in m.worlds if m.le(v, w) and v != w)
    layers: dict[int, list[str]] = {}
    for w in m.worlds:
        layers.setdefault(ranks[w], []).append(w)
    pos = {}
    for r, ws in sorted(layers.items()):
        for i, w in enumerate(sorted(ws)):
            pos[w] = (i - (len(ws) - 1) / 2, r)
    fig, ax = plt.subplots(figsize=(4, 3))
    for u, v in sorted(m.order):
        if u != v and not any(
            m.le(u, z) and m.le(z, v) and z not in (u, v) for z in m.worlds
        ):
            ax.annotate(
                "",
                xy=pos[v],
                xytext=pos[u],
                arrowprops=dict(arrowstyle="-|>", color="gray"),
            )
    for w, (x, y) in pos.items():
        ax.plot([x], [y], "o", markersize=18, color="#264653")
        ax.annotate(
            f"{w}\n|{len(m.interp_of(w))}|",
            pos[w],
            color="white",
            ha="center",
            va="center",
            fontsize=7,
        )
    ax.set_axis_off()
    ax.set_title(title)
    fig.tight_layout()
    return fig
