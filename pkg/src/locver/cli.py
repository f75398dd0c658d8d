"""Command-line front end: ``locver <command> ...``.

Exit codes: 0 accept / member / consistent, 1 reject / non-member /
violated, 2 inconclusive, usage or parse error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from typing import Sequence

from . import report
from .core import Configuration, complete_graph, cycle_graph, global_accept, path_graph, run, star_graph
from .corpus import default_id_pool
from .errors import DomainError, Inconclusive, LocverError, ParseError, UsageError
from .fileformat import Instance, load, parse, serialize
from .games import CertificateSpace, check_class_membership_on_instance
from .iteration import SystemStateCodec, example_machines, iter_instance, iter_pi1_algorithm, parse_machine
from .lifts import k_fold_cover, search_lift_counterexample
from .pi2 import honest_description, refutation_space, verify_pi2
from .reductions import (IDENTITY, apply_reduction, check_label_preserving, miss_lift_prover, miss_lift_verifier,
                         miss_prover, miss_reduction)
from .schemes import (alts_prover, alts_space, alts_verifier, cover_prover, cover_space, cover_verifier, tree_prover,
                      tree_space, tree_verifier)
from .zoo import co_ld_checker, get_language, language_names, ld_checker

OK, NO, UNKNOWN = 0, 1, 2
BUDGET_ENV = "LOCVER_BUDGET"


def _default_budget() -> int | None:
    raw = os.environ.get(BUDGET_ENV)
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None


def _out(args: argparse.Namespace, record: dict, table: str) -> None:
    if args.format == "json":
        print(json.dumps(record, sort_keys=True))
    else:
        print(table)


def _load(path: str) -> Instance:
    if path == "-":
        return parse(sys.stdin.read())
    return load(path)


def _ids(args: argparse.Namespace, config: Configuration) -> list[tuple[int, ...]]:
    """Identity pool from ``--id-pool``: 'default', a count, or explicit 'a,b,c;d,e,f' lists."""
    spec = args.id_pool
    if spec in (None, "default"):
        return default_id_pool(config)
    if spec.isdigit():
        return default_id_pool(config, int(spec))
    pool = []
    for chunk in spec.split(";"):
        try:
            ids = tuple(int(v) for v in chunk.split(","))
        except ValueError:
            raise UsageError(f"bad identity list {chunk!r}") from None
        if len(ids) != config.n or len(set(ids)) != config.n:
            raise UsageError(f"identity list {chunk!r} must hold {config.n} distinct values")
        pool.append(ids)
    return pool


def _scheme(name: str):
    """(prover, verifier, language) for a scheme name."""
    if name == "tree":
        return tree_prover, tree_verifier(), get_language("tree")
    if name == "alts":
        return alts_prover, alts_verifier(), get_language("alts")
    if name == "cover":
        return cover_prover, cover_verifier(), get_language("cover")
    if name == "cover_multiset":
        return (lambda c: cover_prover(c, multiset=True)), cover_verifier(True), get_language("cover_multiset")
    if name == "miss_lift":
        return miss_lift_prover, miss_lift_verifier(), get_language("miss_lift")
    if name.startswith("pi2:"):
        lang = get_language(name[4:])
        return None, verify_pi2(lang), lang
    if name == "iter_pi1":
        return None, iter_pi1_algorithm(), get_language("iter")
    raise UsageError(f"unknown scheme {name!r} (tree, alts, cover, cover_multiset, miss_lift, pi2:<lang>, iter_pi1)")


def _space(spec: str, config: Configuration) -> CertificateSpace:
    kind, _, arg = spec.partition(":")
    nums = [int(v) for v in arg.split(",")] if arg else []
    n, diam = config.n, config.graph.diameter()
    if kind == "varint":
        return CertificateSpace.varints(nums[0] if nums else n)
    if kind == "raw":
        return CertificateSpace.raw(nums[0] if nums else 1)
    if kind == "alts":
        return alts_space(nums[0] if nums else diam)
    if kind == "tree":
        return tree_space(nums[0] if nums else n)
    if kind == "cover":
        return cover_space(config, *(nums or [diam, n]))
    if kind == "refute":
        return refutation_space(*(nums or [diam, n]))
    if kind == "describe":
        c1 = honest_description(config)
        return CertificateSpace(lambda cfg, u: (c1[u],), "honest-description")
    if kind == "k":
        upper = nums[0] if nums else 2 * n
        return CertificateSpace.uniform([k.to_bytes((k.bit_length() + 7) // 8, "big") for k in range(upper + 1)],
                                        f"k<={upper}")
    raise UsageError(f"unknown space {spec!r}")


# -- commands ---------------------------------------------------------------------


def _decide_command(args: argparse.Namespace) -> int:
    inst = _load(args.file)
    lang = get_language(args.lang)
    member = lang(inst.config)
    checker, mode = None, "conjunctive"
    try:
        checker = ld_checker(args.lang)
    except DomainError:
        try:
            checker, mode = co_ld_checker(args.lang), "disjunctive"
        except DomainError:
            pass
    record = {"language": lang.name, "member": member}
    if checker is not None:
        ids = inst.ids or (default_id_pool(inst.config, 1)[0] if checker.uses_ids else None)
        verdicts = run(checker, inst.config, ids)
        record["local"] = {"mode": mode, "verdicts": [verdicts[u] for u in range(inst.config.n)],
                           "accepted": global_accept(verdicts, mode)}
    verdict = "member" if member else "non-member"
    _out(args, record, f"{lang.name}: {verdict}")
    return OK if member else NO


def _verify_command(args: argparse.Namespace) -> int:
    inst = _load(args.file)
    prover, verifier, _ = _scheme(args.scheme)
    if args.prove:
        if prover is None:
            raise UsageError(f"{args.scheme} has no single-layer prover")
        certs = [prover(inst.config)]
    else:
        source = _load(args.certs) if args.certs else inst
        certs = source.cert_levels()
    ids = inst.ids
    if verifier.uses_ids and ids is None:
        ids = default_id_pool(inst.config, 1)[0]
    verdicts = run(verifier, inst.config, ids, certs)
    accepted = global_accept(verdicts)
    record = {"scheme": args.scheme, "accepted": accepted, "verdicts": [verdicts[u] for u in range(inst.config.n)],
              "certs": [[c.hex() for c in level] for level in certs]}
    rows = [f"node {u}: {'accept' if verdicts[u] else 'reject'}" for u in range(inst.config.n)]
    _out(args, record, "\n".join(rows + [f"{args.scheme}: {'accepted' if accepted else 'rejected'}"]))
    return OK if accepted else NO


def _game_command(args: argparse.Namespace) -> int:
    inst = _load(args.file)
    _, alg, lang = _scheme(args.alg) if not args.alg.startswith(("ld:", "co-ld:")) else (None, None, None)
    if args.alg.startswith("ld:"):
        lang = get_language(args.alg[3:])
        alg = ld_checker(args.alg[3:])
    elif args.alg.startswith("co-ld:"):
        lang = get_language(args.alg[6:])
        alg = co_ld_checker(args.alg[6:])
    spaces = [_space(s, inst.config) for s in args.space or []]
    truth = lang(inst.config) if args.truth is None else args.truth == "legal"
    pool = _ids(args, inst.config) if alg.uses_ids else None
    outcome = check_class_membership_on_instance(alg, inst.config, args.cls, spaces, pool, truth, args.budget)
    record = {"algorithm": alg.name, "class": args.cls, "truth": truth, "consistent": bool(outcome),
              "stats": outcome.stats}
    if not outcome:
        w = outcome.witness
        record["witness"] = {"certs": [[c.hex() for c in level] for level in w.certs], "ids": w.ids, "node": w.node}
    _out(args, record, f"{alg.name} {args.cls} ({'legal' if truth else 'illegal'}): "
                       f"{'consistent' if outcome else 'violated'}")
    return OK if outcome else NO


def _lift_command(args: argparse.Namespace) -> int:
    inst = _load(args.file)
    if args.search:
        lang = get_language(args.search)
        found = search_lift_counterexample(lang, inst.config, args.t, args.k_max, args.budget)
        if found is None:
            _out(args, {"language": lang.name, "counterexample": None}, "no lift counterexample found")
            return OK
        lifted, lift_map = found
        if args.format == "json":
            print(json.dumps({"language": lang.name, "phi": list(lift_map.phi), "counterexample": serialize(lifted)},
                             sort_keys=True))
        else:
            print(f"# phi {' '.join(map(str, lift_map.phi))}")
            sys.stdout.write(serialize(lifted))
        return NO
    lifted, lift_map = k_fold_cover(inst.config, args.k, inst.voltages or None)
    if args.format == "json":
        print(json.dumps({"phi": list(lift_map.phi), "cover": serialize(lifted)}, sort_keys=True))
    else:
        print(f"# phi {' '.join(map(str, lift_map.phi))}")
        sys.stdout.write(serialize(lifted))
    return OK


def _digest(values: Sequence[bytes]) -> str:
    h = hashlib.sha256()
    for v in values:
        h.update(len(v).to_bytes(4, "big") + v)
    return h.hexdigest()[:16]


def _reduce_command(args: argparse.Namespace) -> int:
    inst = _load(args.file)
    lang = get_language(args.lang)
    red = miss_reduction(lang) if args.reduction == "miss" else IDENTITY
    target = get_language("miss") if args.reduction == "miss" else lang
    prover = miss_prover if args.reduction == "miss" else honest_description
    pool = _ids(args, inst.config)
    rows = []
    for ids in pool:
        reduced = apply_reduction(red, inst.config, ids)
        rows.append({"ids": list(ids), "member": target(reduced), "certs": _digest(prover(reduced)),
                     "instance": _digest([serialize(reduced).encode()])})
    if args.format == "json":
        for row in rows:
            print(json.dumps(row, sort_keys=True))
    else:
        print(f"{'ids':<20} {'member':<7} {'cert digest':<17} instance digest")
        for row in rows:
            print(f"{','.join(map(str, row['ids'])):<20} {str(row['member']):<7} {row['certs']:<17} {row['instance']}")
    if args.check_label_preserving:
        ok = check_label_preserving(red, prover, inst.config, pool)
        print(f"label-preserving: {'yes' if ok else 'no'}", file=sys.stderr)
        return OK if ok else NO
    return OK


def _inputs(args: argparse.Namespace, n: int) -> list[bytes]:
    if args.inputs:
        values = [bytes.fromhex(v) if v != "-" else b"" for v in args.inputs.split(",")]
        if len(values) != n:
            raise UsageError(f"--inputs needs {n} values, got {len(values)}")
        return values
    inputs = [b""] * n
    if args.selected is not None:
        inputs = [b"\x00"] * n
        for tok in filter(None, args.selected.split(",")):
            u = int(tok)
            if not 0 <= u < n:
                raise UsageError(f"selected node {u} out of range")
            inputs[u] = b"\x01"
    return inputs


def _gen_command(args: argparse.Namespace) -> int:
    if args.kind == "iter":
        machines = example_machines()
        if args.machine in machines:
            machine = machines[args.machine]
        else:
            with open(args.machine, encoding="utf-8") as fh:
                machine = parse_machine(fh.read(), os.path.basename(args.machine))
        codec = SystemStateCodec(machine, args.tape)
        a = codec.initial(list(args.a)) if args.a != "0" else 0
        b = codec.initial(list(args.b)) if args.b != "0" else 0
        config = iter_instance(machine, a, b, args.len_l, args.len_r, codec)
    else:
        builders = {"path": path_graph, "cycle": cycle_graph, "star": star_graph, "complete": complete_graph}
        graph = builders[args.kind](args.size)
        config = Configuration(graph, tuple(_inputs(args, graph.n)))
    text = serialize(config)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return OK


def _report_command(args: argparse.Namespace) -> int:
    records = report.run_suite(args.suite, args.max_n, args.seed)
    if args.format == "json":
        sys.stdout.write(report.render_json(records, with_runtime=not args.no_runtime))
    else:
        sys.stdout.write(report.render_table(records))
    return UNKNOWN if any(r.evidence == "inconclusive" for r in records) else OK


# -- parser -------------------------------------------------------------------------


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("json", "table"), default="table")
    parser.add_argument("--budget", type=int, default=None, help=f"search budget (default: ${BUDGET_ENV})")
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="locver", description="Local distributed verification workbench.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", help="decide membership of an instance")
    p.add_argument("lang", help=f"one of {', '.join(language_names())}, diam_<k>")
    p.add_argument("file")
    _common(p)
    p.set_defaults(handler=_decide_command)

    p = sub.add_parser("verify", help="run a certificate verifier")
    p.add_argument("scheme")
    p.add_argument("file")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--certs", help="instance file whose 'c' records hold the certificates")
    group.add_argument("--prove", action="store_true", help="use the honest prover")
    _common(p)
    p.set_defaults(handler=_verify_command)

    p = sub.add_parser("game", help="check a class definition on one instance by exhaustive search")
    p.add_argument("file")
    p.add_argument("--alg", required=True, help="scheme name, ld:<lang> or co-ld:<lang>")
    p.add_argument("--class", dest="cls", required=True, help="LD, NLD, Sigma1, Pi1, Sigma2, Pi2, co-...")
    p.add_argument("--space", action="append",
                   help="per layer: varint:K raw:L alts:D tree:K cover:D,L refute:D,M describe k:K")
    p.add_argument("--truth", choices=("legal", "illegal"), help="override reference membership")
    p.add_argument("--id-pool", default=None, help="'default', a count, or 'a,b,c;d,e,f'")
    _common(p)
    p.set_defaults(handler=_game_command)

    p = sub.add_parser("lift", help="build a voltage cover, or search for a lift counterexample")
    p.add_argument("file")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--search", metavar="LANG")
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--k-max", type=int, default=2)
    _common(p)
    p.set_defaults(handler=_lift_command)

    p = sub.add_parser("reduce", help="apply a local reduction under an identity pool")
    p.add_argument("file")
    p.add_argument("--lang", required=True)
    p.add_argument("--reduction", choices=("miss", "identity"), default="miss")
    p.add_argument("--check-label-preserving", action="store_true")
    p.add_argument("--id-pool", default="3")
    _common(p)
    p.set_defaults(handler=_reduce_command)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("kind", choices=("path", "cycle", "star", "complete", "iter"))
    p.add_argument("size", type=int, nargs="?", default=3)
    p.add_argument("--inputs", help="comma-separated hex inputs ('-' for empty)")
    p.add_argument("--selected", help="comma-separated selected nodes (others get the unselected bit)")
    p.add_argument("--machine", default="parity", help="example machine name or machine file")
    p.add_argument("--tape", type=int, default=4)
    p.add_argument("--a", default="11", help="initial tape word for a ('0' for the fixed point 0)")
    p.add_argument("--b", default="1", help="initial tape word for b ('0' for the fixed point 0)")
    p.add_argument("--len-l", type=int, default=4)
    p.add_argument("--len-r", type=int, default=2)
    p.add_argument("-o", "--output")
    _common(p)
    p.set_defaults(handler=_gen_command)

    p = sub.add_parser("report", help="desk-scale evidence for the class hierarchy")
    p.add_argument("suite", nargs="?", default="hierarchy", choices=report.SUITES)
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--no-runtime", action="store_true", help="omit runtimes (for byte-level comparison)")
    _common(p)
    p.set_defaults(handler=_report_command)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return UNKNOWN if exc.code else OK
    try:
        if args.budget is None:
            args.budget = _default_budget()
        return args.handler(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return UNKNOWN
    except Inconclusive as exc:
        print(f"inconclusive: {exc} {json.dumps(exc.stats, sort_keys=True)}", file=sys.stderr)
        return UNKNOWN
    except (DomainError, UsageError, LocverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return UNKNOWN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return UNKNOWN


if __name__ == "__main__":
    sys.exit(main())
