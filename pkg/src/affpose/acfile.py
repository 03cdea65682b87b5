"""Flat-text correspondence files.

One correspondence per line, eight whitespace-separated numbers::

    u_i v_i u_j v_j a11 a12 a21 a22

Lines starting with ``#`` are comments.  A comment of the form
``# key: values`` is a header directive; recognized keys:

* ``frame``   -- ``normalized`` (default) or ``pixel`` (centered pixels)
* ``focal``   -- focal length in pixels, used for pixel-domain residuals
* ``gravity`` -- ``pitch_i roll_i pitch_j roll_j`` in radians
* ``truth``   -- ground-truth ``theta phi`` in degrees (test fixtures)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import NORMALIZED, PIXEL, AffineCorrespondence, GravityAlignment, ImagePoint


@dataclass(frozen=True)
class ACFile:
    acs: list[AffineCorrespondence]
    frame: str = NORMALIZED
    focal: float | None = None
    gravity: tuple[GravityAlignment, GravityAlignment] | None = None
    truth: tuple[float, float] | None = None  # degrees


def parse_ac_text(text: str) -> ACFile:
    frame = NORMALIZED
    focal = None
    gravity = None
    truth = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" not in body:
                continue
            key, _, value = body.partition(":")
            key = key.strip().lower()
            value = value.strip()
            if key == "frame":
                if value not in (NORMALIZED, PIXEL):
                    raise ValueError(f"line {lineno}: unknown frame {value!r}")
                frame = value
            elif key == "focal":
                focal = float(value)
            elif key == "gravity":
                vals = [float(v) for v in value.split()]
                if len(vals) != 4:
                    raise ValueError(f"line {lineno}: gravity needs 4 values")
                gravity = (GravityAlignment(vals[0], vals[1]), GravityAlignment(vals[2], vals[3]))
            elif key == "truth":
                vals = [float(v) for v in value.split()]
                if len(vals) != 2:
                    raise ValueError(f"line {lineno}: truth needs 2 values")
                truth = (vals[0], vals[1])
            continue
        vals = [float(v) for v in line.split()]
        if len(vals) != 8:
            raise ValueError(f"line {lineno}: expected 8 numbers, got {len(vals)}")
        rows.append(vals)
    acs = [
        AffineCorrespondence(
            ImagePoint(r[0], r[1], frame),
            ImagePoint(r[2], r[3], frame),
            np.array([[r[4], r[5]], [r[6], r[7]]]),
        )
        for r in rows
    ]
    return ACFile(acs=acs, frame=frame, focal=focal, gravity=gravity, truth=truth)


def read_ac_file(path: str) -> ACFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_ac_text(fh.read())


def format_ac_file(
    acs: list[AffineCorrespondence],
    focal: float | None = None,
    gravity: tuple[GravityAlignment, GravityAlignment] | None = None,
    truth: tuple[float, float] | None = None,
) -> str:
    lines = []
    if acs:
        lines.append(f"# frame: {acs[0].frame}")
    if focal is not None:
        lines.append(f"# focal: {float(focal)!r}")
    if gravity is not None:
        g_i, g_j = gravity
        lines.append(f"# gravity: {g_i.theta_x!r} {g_i.theta_z!r} {g_j.theta_x!r} {g_j.theta_z!r}")
    if truth is not None:
        lines.append(f"# truth: {float(truth[0])!r} {float(truth[1])!r}")
    for ac in acs:
        vals = [ac.p_i.u, ac.p_i.v, ac.p_j.u, ac.p_j.v, *(float(v) for v in ac.A.ravel())]
        lines.append(" ".join(repr(v) for v in vals))
    return "\n".join(lines) + "\n"


def write_ac_file(path: str, acs, focal=None, gravity=None, truth=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_ac_file(acs, focal=focal, gravity=gravity, truth=truth))
