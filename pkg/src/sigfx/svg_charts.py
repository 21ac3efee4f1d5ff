"""Tiny dependency-free SVG line charts for the report tables."""

from __future__ import annotations

import os

__all__ = ["write_line_chart", "emit_charts"]

_W, _H = 640, 400
_ML, _MR, _MT, _MB = 56, 140, 36, 44
_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _x(k, ks):
    lo, hi = min(ks), max(ks)
    span = (hi - lo) or 1.0
    return _ML + (_W - _ML - _MR) * (k - lo) / span


def _y(v):
    return _MT + (_H - _MT - _MB) * (1.0 - v)


def write_line_chart(path, ks, columns, title, ylabel):
    """Lines over thresholds; columns maps name -> {k: value in [0, 1]}."""
    ks = sorted(ks)
    out = ['<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 %d %d" '
           'font-family="sans-serif" font-size="12">' % (_W, _H)]
    out.append('<rect width="%d" height="%d" fill="white"/>' % (_W, _H))
    out.append('<text x="%d" y="20" font-size="14">%s</text>' % (_ML, title))
    for i in range(5):
        v = i / 4.0
        y = _y(v)
        out.append('<line x1="%d" y1="%.1f" x2="%d" y2="%.1f" '
                   'stroke="#ddd"/>' % (_ML, y, _W - _MR, y))
        out.append('<text x="%d" y="%.1f" text-anchor="end">%.2f</text>'
                   % (_ML - 6, y + 4, v))
    for k in ks:
        x = _x(k, ks)
        out.append('<line x1="%.1f" y1="%d" x2="%.1f" y2="%d" '
                   'stroke="#eee"/>' % (x, _MT, x, _H - _MB))
        out.append('<text x="%.1f" y="%d" text-anchor="middle">%g</text>'
                   % (x, _H - _MB + 16, k))
    out.append('<text x="%d" y="%d" text-anchor="middle">threshold k</text>'
               % ((_ML + _W - _MR) // 2, _H - 8))
    out.append('<text x="14" y="%d" transform="rotate(-90 14 %d)" '
               'text-anchor="middle">%s</text>'
               % ((_MT + _H - _MB) // 2, (_MT + _H - _MB) // 2, ylabel))
    for i, (name, vals) in enumerate(columns.items()):
        color = _COLORS[i % len(_COLORS)]
        pts = ["%.1f,%.1f" % (_x(k, ks), _y(vals[k]))
               for k in ks if k in vals]
        if pts:
            out.append('<polyline points="%s" fill="none" stroke="%s" '
                       'stroke-width="1.5"/>' % (" ".join(pts), color))
        ly = _MT + 16 * i
        out.append('<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="%s" '
                   'stroke-width="3"/>' % (_W - _MR + 10, ly, _W - _MR + 28, ly, color))
        out.append('<text x="%d" y="%d">%s</text>' % (_W - _MR + 34, ly + 4, name))
    out.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
    return path


def emit_charts(table, out_dir):
    """One SVG per (pair, lookback, metric), mirroring the report CSVs."""
    os.makedirs(out_dir, exist_ok=True)
    by_pl = {}
    for res in table.results:
        c = res.cell
        by_pl.setdefault((c.pair, c.lookback), []).append(res)
    paths = []
    for (pair, p), group in sorted(by_pl.items()):
        ks = sorted({r.cell.threshold_k for r in group})
        for metric in ("f1", "recall"):
            columns = {}
            for res in group:
                if res.ok:
                    col = columns.setdefault(res.cell.method, {})
                    col[res.cell.threshold_k] = getattr(res.metrics, metric)
            name = "%s_%s_%d.svg" % (metric, pair, p)
            title = "%s, %d-day lookback: %s by threshold" % (pair, p, metric)
            paths.append(write_line_chart(os.path.join(out_dir, name), ks,
                                          columns, title, metric))
    return paths
