"""Command-line front end: single solves, noise sweeps, and oracle checks.

Exit codes: 0 on success, 1 on usage or input errors, 2 when an oracle
cross-check (or the self test) finds a mismatch.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import acfile
from .errors import AffposeError
from .geometry import (
    NORMALIZED,
    PIXEL,
    AffineCorrespondence,
    ImagePoint,
    PlanarMotion,
    rotation_error,
    translation_error,
)
from .oracles import det_trace_values, focal_roots_by_newton, grid_objective_min, canonical_focal_root
from .planar import (
    FocalSolution,
    build_planar_system,
    solve_planar_closed_form,
    solve_planar_least_squares,
    solve_planar_unknown_focal,
)
from .robust import (
    SOLVER_IDS,
    RansacConfig,
    VotingConfig,
    histogram_voting,
    model_pose,
    ransac,
    residual_pixels,
)
from .synth import (
    MotionSpec,
    NoiseConfig,
    SceneConfig,
    SweepSpec,
    generate_instance,
    run_sweep,
    worker_count,
)
from .vertical import build_aligned_system, nullspace_basis, solve_vertical

_USAGE_ERROR = 1
_ORACLE_ERROR = 2


def _deg(x: float) -> str:
    return f"{math.degrees(x):.6f}"


def _print_motion(tag: str, motion: PlanarMotion, extra: str = "") -> None:
    print(f"{tag} theta_deg={_deg(motion.theta)} phi_deg={_deg(motion.phi)}{extra}")


def _candidates_for(solver: str, ac: AffineCorrespondence, gravity):
    if solver == "planar-cf":
        return [solve_planar_closed_form(build_planar_system(ac))]
    if solver == "planar-ls":
        return [p.x.motion() for p in solve_planar_least_squares(build_planar_system(ac))]
    if solver == "planar-unknown-f":
        return list(solve_planar_unknown_focal(ac))
    g_i, g_j = gravity
    return list(solve_vertical(ac, g_i, g_j))


def _convert_frame(acs, src_frame, dst_frame, focal):
    if src_frame == dst_frame:
        return acs
    if focal is None:
        raise AffposeError(
            f"input is in the {src_frame} frame but the solver needs {dst_frame}; "
            "add a '# focal:' header to convert"
        )
    s = 1.0 / focal if dst_frame == NORMALIZED else focal
    out = []
    for ac in acs:
        out.append(
            AffineCorrespondence(
                ImagePoint(ac.p_i.u * s, ac.p_i.v * s, dst_frame),
                ImagePoint(ac.p_j.u * s, ac.p_j.v * s, dst_frame),
                ac.A,
            )
        )
    return out


def cmd_solve(args) -> int:
    try:
        data = acfile.read_ac_file(args.input)
    except (OSError, ValueError) as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    if not data.acs:
        print("error: no correspondences in input", file=sys.stderr)
        return _USAGE_ERROR
    if args.solver == "vertical-1ac" and data.gravity is None:
        print("error: missing alignment (add a '# gravity:' header)", file=sys.stderr)
        return _USAGE_ERROR

    want = PIXEL if args.solver == "planar-unknown-f" else NORMALIZED
    try:
        acs = _convert_frame(data.acs, data.frame, want, data.focal)
    except AffposeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR

    print(f"# solver: {args.solver}  correspondences: {len(acs)}")
    try:
        for idx, ac in enumerate(acs):
            for c, cand in enumerate(_candidates_for(args.solver, ac, data.gravity)):
                try:
                    res = residual_pixels(cand, ac, focal=data.focal)
                    res_txt = f" sampson_px={res:.6g}"
                except (ValueError, AffposeError):
                    res_txt = ""
                if isinstance(cand, FocalSolution):
                    _print_motion(f"ac[{idx}] cand[{c}]", cand.motion, f" f_px={cand.f:.6f}{res_txt}")
                elif isinstance(cand, PlanarMotion):
                    _print_motion(f"ac[{idx}] cand[{c}]", cand, res_txt)
                else:
                    r_deg = math.degrees(math.atan2(cand.R[2, 0], cand.R[0, 0]))
                    t = cand.t
                    print(
                        f"ac[{idx}] cand[{c}] yaw_deg={r_deg:.6f} "
                        f"t=({t[0]:.6f},{t[1]:.6f},{t[2]:.6f}){res_txt}"
                    )
    except AffposeError as exc:
        print(f"error: solver failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _USAGE_ERROR

    if len(acs) > 1:
        cfg = RansacConfig(threshold=args.threshold, iterations=args.iterations, seed=args.seed)
        try:
            result = ransac(args.solver, acs, cfg, gravity=data.gravity, focal=data.focal)
        except AffposeError as exc:
            print(f"error: ransac failed: {type(exc).__name__}: {exc}", file=sys.stderr)
            return _USAGE_ERROR
        model = result.model
        if isinstance(model, FocalSolution):
            _print_motion("ransac", model.motion, f" f_px={model.f:.6f} inliers={result.score}")
        elif isinstance(model, PlanarMotion):
            _print_motion("ransac", model, f" inliers={result.score}")
        else:
            pose = model_pose(model)
            yaw = math.degrees(math.atan2(pose.R[2, 0], pose.R[0, 0]))
            t = pose.t
            print(
                f"ransac yaw_deg={yaw:.6f} t=({t[0]:.6f},{t[1]:.6f},{t[2]:.6f}) inliers={result.score}"
            )
        if args.solver == "planar-cf":
            vote = histogram_voting(acs, VotingConfig(bin_width_deg=args.bin_width))
            _print_motion("voting", vote)
    return 0


def cmd_sweep(args) -> int:
    try:
        levels = tuple(float(v) for v in args.levels.split(","))
        regime = args.regime
        if regime is None:
            regime = "vertical-random" if args.solver == "vertical-1ac" else "planar"
        base_pixel = args.base_pixel_sigma
        if base_pixel is None:
            base_pixel = 0.0 if args.noise_axis == "pixel" else 1.0
        spec = SweepSpec(
            solver=args.solver,
            regime=regime,
            axis=args.noise_axis,
            levels=levels,
            trials=args.trials,
            seed=args.seed,
            estimator=args.estimator,
            scene=SceneConfig(),
            base_noise=NoiseConfig(pixel_sigma=base_pixel),
            ransac=RansacConfig(threshold=args.threshold, iterations=args.iterations),
            voting=VotingConfig(bin_width_deg=args.bin_width),
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR

    result = run_sweep(spec, workers=worker_count())
    table = "\n".join(result.table_lines()) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(table)
        print(f"wrote {args.out}")
    else:
        print(table, end="")
    if args.records:
        with open(args.records, "w", encoding="utf-8") as fh:
            fh.write("\n".join(result.record_lines()) + "\n")
        print(f"wrote {args.records}")
    return 0


def _check_planar_ls_oracle(n: int, seed: int) -> tuple[int, str]:
    scene = SceneConfig(n_ground_points=2, n_plane_points=2)
    worst = -math.inf
    failures = 0
    for k in range(n):
        rng = np.random.default_rng([seed, 10, k])
        inst = generate_instance(scene, MotionSpec(kind="planar"), NoiseConfig(pixel_sigma=1.0), rng)
        C = build_planar_system(inst.acs[k % len(inst.acs)]).C
        grid_min = grid_objective_min(C)
        points = solve_planar_least_squares(build_planar_system(inst.acs[k % len(inst.acs)]))
        solver_min = points[0].objective / float(np.linalg.norm(C)) ** 2
        gap = solver_min - grid_min
        worst = max(worst, gap)
        if gap > 1e-6:
            failures += 1
    return failures, f"planar-ls: worst (solver - grid) objective gap {worst:.3e} over {n} instances"


def _check_unknown_focal_oracle(n: int, seed: int) -> tuple[int, str]:
    scene = SceneConfig(n_ground_points=2, n_plane_points=2)
    failures = 0
    for k in range(n):
        rng = np.random.default_rng([seed, 20, k])
        sigma = (0.0, 0.5, 1.0)[k % 3]
        inst = generate_instance(scene, MotionSpec(kind="planar"), NoiseConfig(pixel_sigma=sigma), rng)
        ac = inst.acs_pixel[k % len(inst.acs)]
        reference = focal_roots_by_newton(ac)
        try:
            mine = []
            for sol in solve_planar_unknown_focal(ac):
                root = canonical_focal_root(sol.motion.theta - sol.motion.phi, sol.motion.phi, sol.g)
                if not any(_same_root(root, other) for other in mine):
                    mine.append(root)
        except AffposeError:
            mine = []
        ok = len(mine) == len(reference) and all(
            any(_same_root(r, o, loose=True) for o in reference) for r in mine
        )
        if not ok:
            failures += 1
    return failures, f"planar-unknown-f: {failures} root-set mismatches over {n} instances"


def _same_root(a, b, loose: bool = False) -> bool:
    tol = 1e-5 if loose else 1e-6
    return (
        abs(math.remainder(a[0] - b[0], 2.0 * math.pi)) < tol
        and abs(math.remainder(a[1] - b[1], 2.0 * math.pi)) < tol
        and abs(a[2] - b[2]) < 1e-8 + tol * b[2]
    )


def _check_vertical_oracle(n: int, seed: int) -> tuple[int, str]:
    scene = SceneConfig(n_ground_points=2, n_plane_points=2)
    from .vertical import build_constraint_matrix, monomials

    worst = 0.0
    for k in range(n):
        rng = np.random.default_rng([seed, 30, k])
        inst = generate_instance(scene, MotionSpec(kind="vertical"), NoiseConfig(), rng)
        g_i, g_j = inst.gravity
        basis = nullspace_basis(build_aligned_system(inst.acs[0], g_i, g_j).M)
        M1 = build_constraint_matrix(basis.m1, basis.m2, basis.m3).M1
        for _ in range(100):
            beta, gamma = rng.normal(0.0, 2.0, size=2)
            direct = det_trace_values(basis.m1, basis.m2, basis.m3, beta, gamma)
            expanded = M1 @ monomials(beta, gamma)
            worst = max(worst, float(np.abs(expanded - direct).max()))
    failures = int(worst > 1e-9)
    return failures, f"vertical-1ac: max |expansion - direct| = {worst:.3e} over {n} instances x 100 points"


_ORACLES = {
    "planar-ls": (_check_planar_ls_oracle, 100),
    "planar-unknown-f": (_check_unknown_focal_oracle, 1000),
    "vertical-1ac": (_check_vertical_oracle, 100),
}


def cmd_oracle_check(args) -> int:
    if args.solver not in _ORACLES:
        print(
            f"error: no oracle registered for {args.solver!r} "
            f"(available: {', '.join(sorted(_ORACLES))})",
            file=sys.stderr,
        )
        return _USAGE_ERROR
    check, default_n = _ORACLES[args.solver]
    n = args.instances or default_n
    failures, report = check(n, args.seed)
    print(report)
    if failures:
        print(f"FAIL: {failures} mismatches", file=sys.stderr)
        return _ORACLE_ERROR
    print("PASS")
    return 0


def cmd_selftest(args) -> int:
    scene = SceneConfig(n_ground_points=2, n_plane_points=2)
    failed = 0

    def run_case(name: str, ok: bool) -> None:
        nonlocal failed
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        if not ok:
            failed += 1

    for s_idx, (solver, kind) in enumerate(
        (
            ("planar-cf", "planar"),
            ("planar-ls", "planar"),
            ("planar-unknown-f", "planar"),
            ("vertical-1ac", "vertical"),
        )
    ):
        worst = 0.0
        for k in range(args.instances):
            rng = np.random.default_rng([args.seed, s_idx, k])
            inst = generate_instance(scene, MotionSpec(kind=kind), NoiseConfig(), rng)
            ac = inst.acs_pixel[0] if solver == "planar-unknown-f" else inst.acs[0]
            try:
                cands = _candidates_for(solver, ac, inst.gravity)
            except AffposeError:
                worst = math.inf
                continue
            errs = []
            for cand in cands:
                pose = model_pose(cand)
                for sign in (1.0, -1.0):
                    e_r = rotation_error(inst.pose.R, pose.R)
                    e_t = translation_error(inst.pose.t, sign * pose.t)
                    errs.append(max(e_r, e_t))
            worst = max(worst, min(errs))
        run_case(f"{solver}: worst noise-free error {worst:.2e} deg < 1e-5", worst < 1e-5)

    spec = SweepSpec(solver="planar-cf", levels=(0.0, 0.5), trials=5, seed=args.seed,
                     scene=scene)
    a = "\n".join(run_sweep(spec).table_lines())
    b = "\n".join(run_sweep(spec).table_lines())
    run_case("sweep determinism (same seed, byte-identical)", a == b)
    return _ORACLE_ERROR if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affpose",
        description="Minimal relative-pose solvers from a single affine correspondence.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve correspondences from a text file")
    p_solve.add_argument("--input", required=True)
    p_solve.add_argument("--solver", required=True, choices=SOLVER_IDS)
    p_solve.add_argument("--threshold", type=float, default=2.0)
    p_solve.add_argument("--iterations", type=int, default=100)
    p_solve.add_argument("--bin-width", type=float, default=1.0)
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.set_defaults(func=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="run a synthetic noise sweep")
    p_sweep.add_argument("--solver", required=True, choices=SOLVER_IDS)
    p_sweep.add_argument("--noise-axis", default="pixel", choices=("pixel", "nonplanar", "pitch", "roll"))
    p_sweep.add_argument("--levels", default="0.0,0.2,0.4,0.6,0.8,1.0")
    p_sweep.add_argument("--trials", type=int, default=1000)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--estimator", default="ransac", choices=("ransac", "voting"))
    p_sweep.add_argument("--regime", default=None,
                         choices=("planar", "vertical-random", "vertical-forward", "vertical-sideways"))
    p_sweep.add_argument("--threshold", type=float, default=2.0)
    p_sweep.add_argument("--iterations", type=int, default=100)
    p_sweep.add_argument("--bin-width", type=float, default=1.0)
    p_sweep.add_argument("--base-pixel-sigma", type=float, default=None)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--records", default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_oracle = sub.add_parser("oracle-check", help="cross-check a solver against its brute-force oracle")
    p_oracle.add_argument("--solver", required=True)
    p_oracle.add_argument("--instances", type=int, default=None)
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.set_defaults(func=cmd_oracle_check)

    p_self = sub.add_parser("selftest", help="quick exactness and determinism battery")
    p_self.add_argument("--instances", type=int, default=25)
    p_self.add_argument("--seed", type=int, default=0)
    p_self.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
