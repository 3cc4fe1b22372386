"""Command line: ``foeed {synth,maskgen,inpaint,compare,smooth}``.

Exit codes: 0 success, 1 no convergence, 2 usage error, 3 I/O error.
"""
import argparse
import csv
import dataclasses
import io
import json
import logging
import sys
from enum import Enum

import numpy as np

from . import masks, metrics, netpbm, solver, synth
from .diffusivity import Diffusivity, DiffusivityKind
from .solver import Init, Model, SolverConfig
from .tensors import Mu3Rule

EXIT_OK, EXIT_NOT_CONVERGED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
CSV_HEADER = ["model", "mse", "aae", "cycles", "op_applications", "wall_ms"]

log = logging.getLogger("foeed")


class UsageError(Exception):
    pass


def _size(text):
    try:
        w, h = (int(t) for t in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}")
    if w < 3 or h < 3:
        raise argparse.ArgumentTypeError("images must be at least 3x3")
    return w, h


def _open_unit(text):
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"must lie strictly between 0 and 1, got {text}")
    return v


def _positive(kind):
    def parse(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return parse


def _nonneg(text):
    v = float(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return v


def _add_solver_flags(p, with_run=True):
    p.add_argument("--model", default="foeed", choices=[m.value for m in Model])
    p.add_argument("--tau", type=_positive(float), help="time step (default 0.25 EED, 0.05 otherwise)")
    p.add_argument("--sigma", type=_nonneg, default=1.0)
    p.add_argument("--lambda", dest="lam", type=_positive(float), default=0.1)
    p.add_argument("--diffusivity", default="charbonnier", choices=[k.value for k in DiffusivityKind])
    p.add_argument("--mu3", default="gmean", choices=[r.value for r in Mu3Rule])
    if with_run:
        p.add_argument("--fsi-n", type=_positive(int), default=40)
        p.add_argument("--tol", type=_positive(float), default=1e-4)
        p.add_argument("--max-cycles", type=_positive(int), default=10000)
        p.add_argument("--no-fsi", dest="fsi", action="store_false", default=None,
                       help="plain explicit steps (default for the adapter models)")
        p.add_argument("--fsi", dest="fsi", action="store_true",
                       help="force FSI acceleration (default for eed and foeed)")
        p.add_argument("--init", default="mean", choices=[i.value for i in Init])


def _config(args, **overrides):
    kw = dict(
        model=args.model, tau=args.tau, sigma=args.sigma,
        diffusivity=Diffusivity(args.diffusivity, args.lam), mu3=args.mu3,
    )
    if hasattr(args, "fsi_n"):
        kw.update(fsi_n=args.fsi_n, stop_tol=args.tol, max_cycles=args.max_cycles,
                  use_fsi=args.fsi, init=args.init)
    kw.update(overrides)
    return SolverConfig(**kw)


def _jsonable(obj):
    if dataclasses.is_dataclass(obj):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Enum):
        return obj.value
    return obj


def _read_image(path):
    return netpbm.read(path).astype(float)


def _read_mask(path, shape):
    raw = netpbm.read(path)
    try:
        m = masks.from_pgm_array(raw)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}")
    if m.shape != tuple(shape):
        raise UsageError(f"mask is {m.shape[1]}x{m.shape[0]} but image is {shape[1]}x{shape[0]}")
    if not m.any():
        raise UsageError("mask has no known pixels")
    return m


def _write_text(path, text):
    netpbm.write_bytes(path, text.encode())


def _csv_text(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(rows)
    return buf.getvalue()


# -- commands ---------------------------------------------------------------

def cmd_synth(args):
    img = synth.make_test_image(synth.SynthSpec(size=args.size))
    netpbm.write(args.output, netpbm.quantize(img))
    print(f"wrote {args.size}x{args.size} test image to {args.output}")
    return EXIT_OK


def cmd_maskgen(args):
    if args.from_marker:
        marker = netpbm.read(args.from_marker)
        if marker.ndim == 3:
            marker = marker.max(axis=2)
        try:
            known, frac = masks.scratch_mask_from_image(marker, args.threshold)
        except ValueError as exc:
            raise UsageError(str(exc))
    else:
        if args.size is None:
            raise UsageError("--size is required unless --from-marker is given")
        w, h = args.size
        if args.scratch is not None:
            marker = masks.scratch_marker(w, h, args.scratch, args.thickness, args.seed)
            known, frac = masks.scratch_mask_from_image(marker)
        elif args.density is not None:
            try:
                known = masks.random_mask(w, h, args.density, args.seed)
            except ValueError as exc:
                raise UsageError(str(exc))
            frac = 1.0 - known.mean()
        else:
            raise UsageError("one of --density, --scratch or --from-marker is required")
    netpbm.write(args.output, masks.to_pgm_array(known))
    print(f"known pixels: {int(known.sum())} (unknown fraction {frac:.4f})")
    return EXIT_OK


def cmd_inpaint(args):
    f = _read_image(args.input)
    known = _read_mask(args.mask, f.shape[:2])
    cfg = _config(args)
    u, reports = solver.run_channelwise(f, known, cfg)
    netpbm.write(args.output, netpbm.quantize(u))
    cycles = max(r.cycles_run for r in reports)
    residual = max(r.final_residual for r in reports)
    wall = sum(r.wall_time for r in reports)
    print(f"cycles: {cycles}  residual: {residual:.3e}  wall time: {wall:.2f} s")
    manifest = {
        "input": args.input, "mask": args.mask, "model": cfg.model.value,
        "config": _jsonable(cfg), "output": args.output,
        "reports": [_jsonable(r) for r in reports],
    }
    if args.reference:
        ref = _read_image(args.reference)
        if ref.shape != u.shape:
            raise UsageError("reference and input dimensions differ")
        manifest["mse"], manifest["aae"] = metrics.mse(u, ref), metrics.aae(u, ref)
        print(f"MSE: {manifest['mse']:.3f}  AAE: {manifest['aae']:.3f}")
    _write_text(args.manifest or args.output + ".json", json.dumps(manifest, indent=2) + "\n")
    if any(r.diverged for r in reports):
        print("warning: the evolution diverged; try a smaller --tau", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    if not all(r.converged for r in reports):
        print("warning: stopped at --max-cycles before reaching --tol", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_compare(args):
    ref = _read_image(args.reference)
    if args.mask:
        known = _read_mask(args.mask, ref.shape[:2])
    elif args.density is not None:
        known = masks.random_mask(ref.shape[1], ref.shape[0], args.density, args.seed)
    else:
        raise UsageError("one of --mask or --density is required")
    model_names = [m.strip() for m in args.models.split(",") if m.strip()]
    for m in model_names:
        if m not in {x.value for x in Model}:
            raise UsageError(f"unknown model {m!r}")
    if args.sweep_diffusivity:
        runs = [(f"{model_names[0]}:{k.value}", _config(args, model=model_names[0],
                                                       diffusivity=Diffusivity(k, args.lam)))
                for k in DiffusivityKind]
    else:
        runs = [(m, _config(args, model=m, tau=args.tau)) for m in model_names]
    rows = []
    status = EXIT_OK
    for name, cfg in runs:
        u, reports = solver.run_channelwise(ref, known, cfg)
        if not all(r.converged for r in reports):
            status = EXIT_NOT_CONVERGED
        rows.append([
            name, f"{metrics.mse(u, ref):.6f}", f"{metrics.aae(u, ref):.6f}",
            max(r.cycles_run for r in reports), sum(r.operator_applications for r in reports),
            f"{1000.0 * sum(r.wall_time for r in reports):.1f}",
        ])
        print(",".join(str(c) for c in rows[-1]))
    text = _csv_text(rows)
    if args.output:
        _write_text(args.output, text)
    return status


def cmd_smooth(args):
    f = _read_image(args.input)
    cfg = _config(args)
    channels = [f] if f.ndim == 2 else [f[..., c] for c in range(f.shape[2])]
    outs, norms = [], []
    for ch in channels:
        n = []
        outs.append(solver.smooth_run(ch, cfg, args.steps, norms=n))
        norms.append(n)
    u = outs[0] if f.ndim == 2 else np.stack(outs, axis=-1)
    netpbm.write(args.output, netpbm.quantize(u))
    if args.norms:
        lines = ["step," + ",".join(f"norm{c}" for c in range(len(norms)))]
        lines += [f"{k}," + ",".join(repr(n[k]) for n in norms) for k in range(args.steps + 1)]
        _write_text(args.norms, "\n".join(lines) + "\n")
    print(f"{args.steps} steps; final range [{u.min():.3f}, {u.max():.3f}]")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="foeed", description="PDE-based image inpainting")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="write the synthetic shapes test image")
    s.add_argument("--size", type=_positive(int), default=300)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("maskgen", help="write a known-pixel mask (255 known, 0 unknown)")
    s.add_argument("--size", type=_size)
    s.add_argument("--density", type=_open_unit, help="fraction of known pixels")
    s.add_argument("--scratch", type=_open_unit, help="fraction of pixels covered by scratches")
    s.add_argument("--thickness", type=_positive(float), default=3.0)
    s.add_argument("--from-marker", help="marker image; pixels above --threshold become unknown")
    s.add_argument("--threshold", type=float, default=128)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_maskgen)

    s = sub.add_parser("inpaint", help="reconstruct an image from its known pixels")
    s.add_argument("input")
    s.add_argument("--mask", required=True)
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--reference", help="ground truth for MSE/AAE")
    s.add_argument("--manifest", help="run manifest path (default OUTPUT.json)")
    s.add_argument("--seed", type=int, default=0, help="recorded in the manifest")
    _add_solver_flags(s)
    s.set_defaults(func=cmd_inpaint)

    s = sub.add_parser("compare", help="MSE/AAE table for several models")
    s.add_argument("--reference", required=True)
    s.add_argument("--mask")
    s.add_argument("--density", type=_open_unit)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--models", default="eed,foeed,li1,li2")
    s.add_argument("--sweep-diffusivity", action="store_true",
                   help="run the first model once per diffusivity instead")
    s.add_argument("-o", "--output", help="CSV path")
    _add_solver_flags(s)
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("smooth", help="pure smoothing without known pixels")
    s.add_argument("input")
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--norms", help="CSV of the L2 norm after every step")
    _add_solver_flags(s, with_run=False)
    s.set_defaults(func=cmd_smooth)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "steps", 0) is not None and getattr(args, "steps", 0) < 0:
        parser.error("--steps must be non-negative")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"foeed {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, netpbm.NetpbmError) as exc:
        print(f"foeed {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
