"""Command-line front end.

Exit status: 0 on success, 1 when a signature is rejected or an attack
fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments as ex
from .distinguisher import (
    column_probabilities,
    experimental_threshold,
    min_signatures,
    nstar_optimal_delta,
)
from .isd import attack_cost_estimate, full_attack
from .params import ParameterError, get_params
from .scheme import PrivateKey, PublicKey, check_key_pair, keygen, make_rng, sign, verify
from .serialize import FormatError, deserialize, load, load_signature, save, serialize


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"shmww: {msg}", file=sys.stderr)


def _load_pk(path) -> PublicKey:
    obj = load(path)
    if not isinstance(obj, PublicKey):
        raise UsageError(f"{path} is not a public key")
    return obj


def cmd_keygen(args) -> int:
    ps = get_params(args.params)
    pk, sk = keygen(ps, args.seed.encode())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save(out / "pk.bin", pk)
    save(out / "sk.bin", sk)
    print(f"wrote {out / 'pk.bin'} and {out / 'sk.bin'} ({ps.name})")
    return 0


def cmd_sign(args) -> int:
    pk = _load_pk(args.pk)
    sk = load(args.sk)
    if not isinstance(sk, PrivateKey):
        raise UsageError(f"{args.sk} is not a secret key")
    if sk.params != pk.params:
        raise UsageError("keys belong to different parameter sets")
    rng = make_rng(args.seed.encode() if args.seed else None)
    if args.count:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for i in range(args.count):
            msg = b"message-%d" % i
            (out / f"msg-{i:04d}.bin").write_bytes(msg)
            save(out / f"sig-{i:04d}.bin", (pk.params, sign(sk, pk, msg, rng, args.raw_challenge)))
        print(f"wrote {args.count} signatures to {out}")
        return 0
    if not args.msg:
        raise UsageError("sign needs --msg FILE or --count N")
    msg = Path(args.msg).read_bytes()
    save(args.out, (pk.params, sign(sk, pk, msg, rng, args.raw_challenge)))
    return 0


def cmd_verify(args) -> int:
    pk = _load_pk(args.pk)
    ps, sig = load_signature(args.sig)
    if ps != pk.params:
        print("reject: parameter sets differ")
        return 1
    ok = verify(pk, Path(args.msg).read_bytes(), sig)
    print("accept" if ok else "reject")
    return 0 if ok else 1


def cmd_attack(args) -> int:
    pk = _load_pk(args.pk)
    ps = pk.params
    sigs = []
    for path in args.sigs:
        sps, sig = load_signature(path)
        if sps != ps:
            raise UsageError(f"{path} uses parameter set {sps.name}, not {ps.name}")
        sigs.append(sig)
    tau, delta = args.tau, args.delta
    if tau is None and delta is None:
        tau = experimental_threshold(ps, len(sigs))
    report = full_attack(pk, sigs, delta=delta, tau=tau, rng=make_rng(args.seed),
                         max_iters=args.max_iters, shared=not args.per_row,
                         workers=args.threads)
    print(f"params={ps.name} N={report.N} tau={report.tau} guessed={report.guessed_size} "
          f"free_sets={report.samples} seconds={report.seconds:.2f} success={report.success}")
    if not report.success:
        _err(f"attack failed: {report.error}")
        return 1
    if args.out:
        blob = serialize(PrivateKey(ps, report.key))
        if not check_key_pair(pk, deserialize(blob).E):
            _err("serialized key failed re-verification; nothing written")
            return 1
        Path(args.out).write_bytes(blob)
        print(f"wrote {args.out}")
    return 0


def cmd_experiment(args) -> int:
    ps = get_params(args.params)
    n_list = args.n_list
    workers = args.threads
    kind = args.kind
    if kind == "bias":
        N = n_list[0] if n_list else 1000
        rows = ex.run_bias_experiment(ps, N, args.seed, args.raw_challenge)
        header = ex.BIAS_HEADER
        s = ex.bias_summary(rows)
        print(f"mean frequency: random {s['mean_random']:.4f}, identity {s['mean_identity']:.4f}; "
              f"min random {s['min_random']:.4f}, max identity {s['max_identity']:.4f}")
    elif kind == "confidence":
        rows = ex.run_confidence_experiment(ps, n_list or [110], args.trials, args.seed,
                                            raw_challenge=args.raw_challenge, workers=workers)
        header = ex.CONFIDENCE_HEADER
        for r in rows:
            print(f"N={r['N']} delta={r['delta']:.6f} theory={r['alpha_theory']:.4g} "
                  f"empirical={r['alpha_empirical']:.3f}")
    elif kind == "nstar":
        rows = ex.run_nstar([ps], args.alpha)
        header = ex.NSTAR_HEADER
        for r in rows:
            print(f"{r['params']}: N*={r['n_star']} at delta={r['delta']:.4f}")
    elif kind == "attack-timing":
        rows = ex.run_attack_timing(ps, n_list or [32], args.trials, args.seed,
                                    shared=not args.per_row, max_iters=args.max_iters,
                                    workers=workers, raw_challenge=args.raw_challenge)
        header = ex.TIMING_HEADER
        for r in rows:
            print(f"N={r['N']} tau={r['tau']} success={r['success_rate']:.2f} "
                  f"avg={r['avg_seconds']:.1f}s")
    else:
        rows = ex.run_primitive_bench(ps, args.trials, args.seed)
        header = ex.BENCH_HEADER
        for r in rows:
            print(f"{r['operation']}: {r['mean_ms']:.2f} ms (sd {r['stdev_ms']:.2f})")
    if args.csv:
        ex.write_csv(rows, args.csv, header)
    return 0


def cmd_estimate(args) -> int:
    ps = get_params(args.params)
    delta = args.delta if args.delta is not None else nstar_optimal_delta(args.alpha, ps)
    _, rho_I = column_probabilities(ps)
    est = attack_cost_estimate(ps, args.alpha, delta)
    print(f"params          {ps.name}")
    print(f"rho_R, rho_I    0.5, {rho_I:.6f}")
    print(f"delta           {delta:.6f}")
    print(f"N*              {min_signatures(args.alpha, delta, ps)} (alpha* = {args.alpha})")
    print(f"isd p           {est.p:.6f}")
    print(f"iterations/row  {est.expected_iterations:.3f}")
    print(f"log2 isd cost   {est.log2_total_cost:.3f}")
    print(f"log2 total      {est.log2_attack_bound:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shmww", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    k = sub.add_parser("keygen", help="generate a key pair")
    k.add_argument("--params", required=True)
    k.add_argument("--seed", required=True)
    k.add_argument("--out", required=True, help="output directory")
    k.set_defaults(fn=cmd_keygen)

    s = sub.add_parser("sign", help="sign a message file, or --count fresh messages")
    s.add_argument("--pk", required=True)
    s.add_argument("--sk", required=True)
    s.add_argument("--msg")
    s.add_argument("--count", type=int)
    s.add_argument("--out", required=True, help="signature file, or directory with --count")
    s.add_argument("--seed")
    s.add_argument("--raw-challenge", action="store_true",
                   help="sample the challenge directly instead of hashing")
    s.set_defaults(fn=cmd_sign)

    v = sub.add_parser("verify", help="verify a signature")
    v.add_argument("--pk", required=True)
    v.add_argument("--msg", required=True)
    v.add_argument("--sig", required=True)
    v.set_defaults(fn=cmd_verify)

    a = sub.add_parser("attack", help="recover the secret key from signatures")
    a.add_argument("--pk", required=True)
    a.add_argument("--sigs", nargs="+", required=True)
    g = a.add_mutually_exclusive_group()
    g.add_argument("--delta", type=float)
    g.add_argument("--tau", type=int)
    g.add_argument("--auto-threshold", action="store_true",
                   help="balanced threshold from the column-type proportions (default)")
    a.add_argument("--out", help="where to write the recovered secret key")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--max-iters", type=int, default=5000)
    a.add_argument("--per-row", action="store_true",
                   help="draw independent free sets for every row")
    a.add_argument("--threads", type=int, default=ex.default_workers())
    a.set_defaults(fn=cmd_attack)

    e = sub.add_parser("experiment", help="reproduce a table or figure as CSV")
    e.add_argument("kind", choices=ex.EXPERIMENTS)
    e.add_argument("--params", default="para1")
    e.add_argument("--trials", type=int, default=10)
    e.add_argument("--n-list", type=int, nargs="+", default=[])
    e.add_argument("--csv")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--alpha", type=float, default=0.9)
    e.add_argument("--max-iters", type=int, default=5000)
    e.add_argument("--per-row", action="store_true")
    e.add_argument("--raw-challenge", action="store_true")
    e.add_argument("--threads", type=int, default=ex.default_workers())
    e.set_defaults(fn=cmd_experiment)

    t = sub.add_parser("estimate", help="closed-form attack estimates")
    t.add_argument("--params", required=True)
    t.add_argument("--alpha", type=float, default=0.9)
    t.add_argument("--delta", type=float)
    t.set_defaults(fn=cmd_estimate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "trials", 1) < 1:
            raise UsageError("--trials must be >= 1")
        return args.fn(args)
    except (UsageError, ParameterError, FormatError, FileNotFoundError, ValueError) as exc:
        _err(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
