"""Command-line entry point: ``cardlab <subcommand> [flags]``.

Any flag may also come from a ``--config`` file of ``key = value`` lines;
flags given on the command line win. Every file written starts with a
manifest that records the resolved run configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from cardlab import __version__
from cardlab.errors import CardLabError


def _config_defaults(path) -> dict:
    out = {}
    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise CardLabError(f"{path}:{n}: expected 'key = value'")
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def _csv_ints(text):
    return [int(x) for x in str(text).split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cardlab", description="Card-game trajectory factory and evaluation harness.")
    ap.add_argument("--version", action="version", version=f"cardlab {__version__}")
    ap.add_argument("--config", help="file of 'key = value' lines supplying default flag values")
    sub = ap.add_subparsers(dest="command", required=True, metavar="{gen,filter,render,mix,stats,train-dqn,eval}")

    p = sub.add_parser("gen", help="play seeded matches and write a trajectory file")
    p.add_argument("--game", required=True)
    p.add_argument("--games", type=int, required=True)
    p.add_argument("--teacher", default="rule", help="policy binding for the teacher seat(s)")
    p.add_argument("--opponent", default="random", help="policy binding for the other seats")
    p.add_argument("--seats", help="comma-separated binding per seat, overriding --teacher/--opponent")
    p.add_argument("--teacher-seats", type=_csv_ints, help="seats whose steps are flagged as teacher steps")
    p.add_argument("--no-rotate", action="store_true", help="keep every binding in its seat for all matches")
    p.add_argument("--max-deals", type=int, help="Guandan: deals per match")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("filter", help="keep winning-side steps with more than one legal action")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--teacher-only", action="store_true")
    p.add_argument("--drop-teammates", action="store_true", help="Guandan: keep only the first finisher's steps")

    p = sub.add_parser("render", help="turn sample records into instruction/output SFT records")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("mix", help="sample exact per-game counts into one shuffled file")
    p.add_argument("--spec", required=True, help="file of 'game = count' lines")
    p.add_argument("--pool", action="append", default=[], metavar="GAME=PATH", required=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("stats", help="Table-1-style statistics of a trajectory file")
    p.add_argument("--in", dest="inp", required=True)

    p = sub.add_parser("train-dqn", help="train a DQN poker policy against a random opponent")
    p.add_argument("--game", required=True)
    p.add_argument("--steps", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hidden", type=_csv_ints, default=[64, 64])
    p.add_argument("--lr", type=float, default=5e-4)
    p.add_argument("--gamma", type=float, default=0.99)
    p.add_argument("--log-every", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="score the --p0 policy against --p1")
    p.add_argument("--game", required=True)
    p.add_argument("--p0", required=True, help="subject policy binding")
    p.add_argument("--p1", default="random", help="opponent policy binding")
    p.add_argument("--games", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-deals", type=int, help="Guandan: cap on deals per match")
    p.add_argument("--out")
    return ap


def parse_args(argv):
    ap = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        defaults = _config_defaults(known.config)
        cmd = next((a for a in argv if not a.startswith("-") and a in _subparsers(ap)), None)
        if cmd is not None:
            sp = _subparsers(ap)[cmd]
            valid = {a.dest: a for a in sp._actions}
            for key, value in defaults.items():
                if key in valid:
                    action = valid[key]
                    if action.type is not None and isinstance(value, str):
                        value = action.type(value)
                    elif isinstance(action, argparse._StoreTrueAction):
                        value = value.lower() in ("1", "true", "yes", "on")
                    sp.set_defaults(**{key: value})
                    action.required = False
    return ap.parse_args(argv)


def _subparsers(ap) -> dict:
    for action in ap._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices
    return {}


def _run_config(args) -> dict:
    # worker count never changes output bytes, so it is not part of the recorded run
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("config", "workers")}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (CardLabError, OSError, ValueError) as exc:
        print(f"cardlab: config: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    try:
        return _dispatch(args)
    except (CardLabError, OSError, ValueError) as exc:
        print(f"cardlab {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    from cardlab import pipeline

    run = _run_config(args)
    if args.command == "gen":
        from cardlab.core import get_engine

        options = {"max_deals": args.max_deals} if args.max_deals is not None else {}
        if args.seats:
            seats = [s.strip() for s in args.seats.split(",")]
            spec = pipeline.MatchupSpec(args.game, seats, args.teacher_seats or [0], args.games, args.seed,
                                        rotate=not args.no_rotate, options=options)
        else:
            spec = pipeline.MatchupSpec.teacher_vs(args.game, args.teacher, args.opponent, args.games, args.seed,
                                                   **options)
            if args.teacher_seats is not None:
                n = get_engine(spec.game).num_players
                spec = pipeline.MatchupSpec(spec.game, [args.teacher if i in args.teacher_seats else args.opponent
                                                        for i in range(n)], args.teacher_seats, args.games,
                                            args.seed, rotate=not args.no_rotate, options=options)
            spec.rotate = not args.no_rotate
        n = pipeline.generate(spec, args.out, workers=args.workers, run_config=run)
        print(json.dumps({"out": args.out, "games": args.games, "steps": n}))
    elif args.command == "filter":
        n = pipeline.filter_file(args.inp, args.out, teacher_only=args.teacher_only,
                                 keep_teammates=not args.drop_teammates, run_config=run)
        print(json.dumps({"out": args.out, "samples": n}))
    elif args.command == "render":
        from cardlab.prompts.sft import emit_sft

        n = emit_sft(args.inp, args.out, run_config=run)
        print(json.dumps({"out": args.out, "records": n}))
    elif args.command == "mix":
        counts = pipeline.parse_mix_spec(Path(args.spec).read_text(encoding="utf-8"))
        pools = {}
        for item in args.pool:
            game, sep, path = item.partition("=")
            if not sep:
                raise CardLabError(f"--pool expects GAME=PATH, got {item!r}")
            pools[game.strip()] = path.strip()
        hist = pipeline.mix(counts, pools, args.seed, args.out, run_config=run)
        print(json.dumps({"out": args.out, "total": sum(hist.values()), "histogram": hist}))
    elif args.command == "stats":
        st = pipeline.stats(args.inp)
        print(st.table())
        print(json.dumps(st.to_json()))
    elif args.command == "train-dqn":
        from cardlab.agents.dqn import DQNConfig, train_dqn

        cfg = DQNConfig(hidden=tuple(args.hidden), gamma=args.gamma, lr=args.lr, train_steps=args.steps)
        log = (lambda line: print(line, file=sys.stderr)) if args.log_every else None
        policy = train_dqn(args.game, cfg, seed=args.seed, log_every=args.log_every, log=log or print)
        policy.save(args.out)
        print(json.dumps({"out": args.out, "game": policy.game.value, "steps": args.steps}))
    elif args.command == "eval":
        from cardlab.harness.evaluate import evaluate

        options = {"max_deals": args.max_deals} if args.max_deals is not None else None
        report = evaluate(args.game, args.p0, args.p1, args.games, seed=args.seed, workers=args.workers,
                          engine_options=options)
        line = json.dumps(report.to_json())
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(pipeline.dumps(pipeline.manifest("report", command="eval", config=run)) + "\n")
                fh.write(line + "\n")
        print(line)
        if report.partial:
            return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
