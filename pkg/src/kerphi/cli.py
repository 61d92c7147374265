"""Command line front end.

Four subcommands over a JSON-configured instance:

``validate``
    Build all 46 subgroups and check kernel membership, pattern rows,
    determinacy, b-patterns, and the edge-in-face witnesses.
``tables``
    Dump the subgroup tables (labels, patterns, encodings, generators).
``triangle``
    Actualize one triangle from three kernel words and report every
    segment, region, and area bound check.
``fill``
    Span a loop (from a file, or seeded random) by the subdivision
    diagram and compare the exact cost against the closed-form branch.

Words are written in the letter grammar: ``Y(i,t)`` is the kernel word
of generator ``t`` at slot ``i``; ``Z(j,i,k,r,+)`` lifts basis vector
``r`` of block ``j`` at slot ``i`` and its inverse at slot ``k``; a
leading ``-`` inverts a letter.  Loop files hold one letter per line,
with blank lines and ``#`` comments ignored.

Exit status is 0 only if every requested check passed, 1 if some check
failed, and 2 for configuration or usage errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from .abelian import BlockDecomposition, ZVec
from .factor import FactorSpec, Word, df_factor_spec
from .filler import (
    DehnModel,
    KernelLoop,
    ModelRangeError,
    OpenLoop,
    fill,
    random_kernel_loop,
)
from .lattice import (
    ALL_LABELS,
    EDGE_FACE_ADJACENCY,
    build_all_subgroups,
    edge_in_face_witnesses,
    realize_word,
    tables_json,
    tables_text,
    verify_b_pattern,
    verify_determinacy,
    verify_pattern,
    verify_phi_zero,
)
from .lattice import parse_letter
from .product import Instance, ProductElement
from .triangle import NotInKernel, VerificationFailure, actualize

FIXTURES = ("df3", "df4", "df5")


class ConfigError(ValueError):
    """The configuration file cannot be used."""


@dataclass(frozen=True)
class InstanceConfig:
    n: int
    block_sizes: tuple[int, ...]
    factors: Any  # "df" or a list of factor dicts
    model: DehnModel
    bigon_constant: int | None
    bfs_budget: int | None
    seed: int


# --- configuration -----------------------------------------------------------


def load_config_data(source: str) -> dict:
    """Read a config from a path, or from a named built-in fixture."""
    path = Path(source)
    if path.exists():
        text = path.read_text()
    elif source in FIXTURES:
        text = (
            resources.files("kerphi") / "fixtures" / f"{source}.json"
        ).read_text()
    else:
        raise ConfigError(f"no such config file or fixture: {source}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"bad JSON in {source}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def parse_model(data: Any) -> DehnModel:
    if data is None:
        return DehnModel.quadratic()
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError("dehn_model must be an object with a 'kind'")
    kind = data["kind"]
    if kind == "quadratic":
        return DehnModel.quadratic()
    if kind == "polynomial":
        try:
            return DehnModel.polynomial(int(data["degree"]))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad polynomial model: {exc}") from exc
    if kind == "table":
        values = data.get("values")
        if not isinstance(values, list) or not values:
            raise ConfigError("table model needs a nonempty 'values' list")
        return DehnModel.from_table(
            values, superadditive=bool(data.get("superadditive", False))
        )
    raise ConfigError(f"unknown model kind {kind!r}")


def parse_config(data: dict) -> InstanceConfig:
    version = data.get("version")
    if version != 1:
        raise ConfigError(f"unsupported config version {version!r}")
    try:
        n = int(data["n"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"config needs an integer 'n': {exc}") from exc
    sizes = data.get("block_sizes")
    if sizes is None:
        block_sizes = (1,) * n
    else:
        block_sizes = tuple(int(s) for s in sizes)
        if len(block_sizes) != n:
            raise ConfigError(
                f"block_sizes has {len(block_sizes)} entries, expected {n}"
            )
    factors = data.get("factors", "df")
    model = parse_model(data.get("dehn_model"))
    M = data.get("bigon_constant")
    budget = data.get("bfs_budget")
    return InstanceConfig(
        n=n,
        block_sizes=block_sizes,
        factors=factors,
        model=model,
        bigon_constant=None if M is None else int(M),
        bfs_budget=None if budget is None else int(budget),
        seed=int(data.get("seed", 0)),
    )


def _explicit_factor(
    dec: BlockDecomposition, data: dict, position: int
) -> FactorSpec:
    try:
        count = int(data["generators"])
        phi_rows = data["phi"]
        section_rows = data["sections"]
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"factor {position}: {exc}") from exc

    def word(signed: Sequence[int]) -> Word:
        return Word.from_letters(
            (abs(v), 1 if v > 0 else -1) for v in signed
        )

    try:
        return FactorSpec(
            generator_count=count,
            phi_images=tuple(ZVec(tuple(row), dec) for row in phi_rows),
            decomposition=dec,
            section_table=tuple(
                tuple(word(lift) for lift in row) for row in section_rows
            ),
            ks_free_basis=bool(data.get("ks_free", False)),
            name=str(data.get("name", f"factor {position}")),
        )
    except ValueError as exc:
        raise ConfigError(f"factor {position}: {exc}") from exc


def build_instance(cfg: InstanceConfig, bfs_budget: int | None = None) -> Instance:
    dec = BlockDecomposition(
        m=sum(cfg.block_sizes), n=cfg.n, block_sizes=cfg.block_sizes
    )
    budget = bfs_budget if bfs_budget is not None else cfg.bfs_budget
    if cfg.factors == "df":
        spec = df_factor_spec(dec)
        if budget is not None:
            spec = dataclasses.replace(spec, bfs_budget=budget)
        specs = (spec,) * (2 * cfg.n)
    elif isinstance(cfg.factors, list):
        if len(cfg.factors) != 2 * cfg.n:
            raise ConfigError(
                f"need {2 * cfg.n} factors, got {len(cfg.factors)}"
            )
        built = []
        for pos, entry in enumerate(cfg.factors, start=1):
            spec = _explicit_factor(dec, entry, pos)
            if budget is not None:
                spec = dataclasses.replace(spec, bfs_budget=budget)
            built.append(spec)
        specs = tuple(built)
    else:
        raise ConfigError("factors must be \"df\" or a list of factor objects")
    return Instance(dec, specs, cfg.model)


def _setup(args: argparse.Namespace) -> tuple[InstanceConfig, Instance]:
    cfg = parse_config(load_config_data(args.config))
    inst = build_instance(cfg, getattr(args, "bfs_budget", None))
    return cfg, inst


# --- words and loops ---------------------------------------------------------


def parse_word(inst: Instance, text: str) -> ProductElement:
    """A kernel word from whitespace-separated letters; empty = identity."""
    tokens = text.split()
    return realize_word(inst, [parse_letter(t) for t in tokens])


def read_loop(path: str) -> KernelLoop:
    tokens = []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens.append(line)
    return KernelLoop.from_tokens(tokens)


def _emit(args: argparse.Namespace, text: str, payload: dict) -> None:
    if args.out == "json":
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text)


# --- subcommands -------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    _, inst = _setup(args)
    defs = build_all_subgroups(inst)

    def check(label: str) -> dict:
        sdef = defs[label]
        phi_ok, phi_witnesses = verify_phi_zero(inst, sdef)
        pattern = verify_pattern(inst, sdef)
        determinacy = verify_determinacy(inst, sdef)
        b_pattern = verify_b_pattern(inst, sdef)
        record: dict[str, Any] = {
            "label": label,
            "kind": sdef.kind,
            "phi_zero": phi_ok,
            "pattern": pattern.ok,
            "determinacy": determinacy.ok,
            "b_pattern": None if b_pattern is None else b_pattern.ok,
        }
        if phi_witnesses:
            record["phi_witnesses"] = list(phi_witnesses)
        if sdef.notes:
            record["notes"] = sdef.notes
        return record

    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        records = list(pool.map(check, ALL_LABELS))

    incidence: dict[str, dict[str, list[dict]]] = {}
    for edge_label in sorted(EDGE_FACE_ADJACENCY):
        row = {}
        for face_label in EDGE_FACE_ADJACENCY[edge_label]:
            witnesses = edge_in_face_witnesses(
                inst, defs[edge_label], defs[face_label]
            )
            row[face_label] = [
                {"letter": w.letter, "word": list(w.word)} for w in witnesses
            ]
        incidence[edge_label] = row

    ok = all(
        r["phi_zero"]
        and r["pattern"]
        and r["determinacy"]
        and r["b_pattern"] is not False
        for r in records
    )

    lines = [f"instance: n={inst.n} m={inst.decomposition.m}"]
    lines.append(f"subgroup checks ({len(records)}):")
    for r in records:
        flags = " ".join(
            f"{name}={'ok' if value else 'FAIL'}"
            for name, value in (
                ("phi-zero", r["phi_zero"]),
                ("pattern", r["pattern"]),
                ("determinacy", r["determinacy"]),
            )
        )
        if r["b_pattern"] is not None:
            flags += f" b-pattern={'ok' if r['b_pattern'] else 'FAIL'}"
        note = f"  note: {r['notes']}" if "notes" in r else ""
        lines.append(f"  {r['label']:<8} {r['kind']:<5} {flags}{note}")
    lines.append(f"edge-in-face witnesses ({len(incidence)} edges):")
    for edge_label, row in incidence.items():
        for face_label, witnesses in row.items():
            longest = max(len(w["word"]) for w in witnesses)
            lines.append(
                f"  {edge_label:<8} in {face_label:<6}"
                f" {len(witnesses)} witnesses, max length {longest}"
            )
    lines.append(f"overall: {'PASS' if ok else 'FAIL'}")
    _emit(
        args,
        "\n".join(lines) + "\n",
        {
            "n": inst.n,
            "subgroups": records,
            "incidence": incidence,
            "ok": ok,
        },
    )
    return 0 if ok else 1


def cmd_tables(args: argparse.Namespace) -> int:
    _, inst = _setup(args)
    if args.out == "json":
        sys.stdout.write(tables_json(inst))
    else:
        sys.stdout.write(tables_text(inst))
    return 0


def cmd_triangle(args: argparse.Namespace) -> int:
    cfg, inst = _setup(args)
    try:
        a = parse_word(inst, args.a)
        b = parse_word(inst, args.b)
        c = parse_word(inst, args.c)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad corner word: {exc}") from exc
    try:
        act = actualize(inst, a, b, c)
    except NotInKernel as exc:
        raise ConfigError(str(exc)) from exc
    except VerificationFailure as exc:
        sys.stderr.write(f"verification failed: {exc}\n")
        return 1

    seg_checks = act.segment_checks()
    reg_checks = act.region_checks()
    area = act.area_bound(cfg.model)
    ok = all(s.within_bound and s.within_4d for s in seg_checks) and all(
        r.within_24d for r in reg_checks
    )

    lines = [
        f"corner distances: D={act.D}"
        f" ({'exact' if act.D_exact else 'upper bound'})"
    ]
    lines.append(f"segments ({len(seg_checks)}):")
    for s in seg_checks:
        status = "ok" if s.within_bound and s.within_4d else "FAIL"
        lines.append(
            f"  {s.edge[0]:>5} -> {s.edge[1]:<5} [{s.label:<7}]"
            f" length {s.length:>3} <= bound {s.bound_value:>3}"
            f" ({s.bound})  {status}"
        )
    lines.append(f"regions ({len(reg_checks)}):")
    for r in reg_checks:
        status = "ok" if r.within_24d else "FAIL"
        lines.append(
            f"  {r.label:<8} perimeter {r.perimeter:>3}"
            f" <= {24 * act.D:>4}  {status}"
        )
    lines.append(
        f"area bound: coarse {area.coarse}, refined {area.refined}"
    )
    lines.append(f"overall: {'PASS' if ok else 'FAIL'}")

    payload = {
        "D": act.D,
        "D_exact": act.D_exact,
        "segments": [dataclasses.asdict(s) for s in seg_checks],
        "regions": [dataclasses.asdict(r) for r in reg_checks],
        "area": {"coarse": area.coarse, "refined": area.refined},
        "ok": ok,
    }
    _emit(args, "\n".join(lines) + "\n", payload)
    return 0 if ok else 1


def cmd_fill(args: argparse.Namespace) -> int:
    cfg, inst = _setup(args)
    seed = cfg.seed if args.seed is None else args.seed
    try:
        if args.loop is not None:
            loop = read_loop(args.loop)
        else:
            loop = random_kernel_loop(inst, args.random, seed=seed)
        report = fill(inst, loop, cfg.model, M=cfg.bigon_constant)
    except (OpenLoop, ModelRangeError) as exc:
        raise ConfigError(str(exc)) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    ok = report.exact_sum <= report.closed_form_bound
    lines = [
        f"loop: {len(loop)} letters, padded to {report.loop_length}"
        f" (k={report.k})"
    ]
    lines.append(
        f"diagram: {report.triangle_count} formal triangles"
        f" ({report.nondegenerate_count} spanned,"
        f" {report.degenerate_count} degenerate),"
        f" {report.bigon_count} bigons"
    )
    lines.append("triangles:")
    for cost in report.triangle_costs:
        lines.append(
            f"  corners {cost.corners[0]:>3},{cost.corners[1]:>3},"
            f"{cost.corners[2]:>3}  D={cost.D:>3}  cost {cost.cost}"
        )
    lines.append(
        f"bigons: {report.bigon_count} x {report.bigon_constant}"
    )
    lines.append(f"exact sum: {report.exact_sum}")
    lines.append(
        f"closed form ({report.branch}): {report.closed_form_bound}"
    )
    lines.append(f"overall: {'PASS' if ok else 'FAIL'}")

    payload = {
        "loop_letters": loop.display().split() if len(loop) else [],
        "padded_length": report.loop_length,
        "k": report.k,
        "triangle_count": report.triangle_count,
        "nondegenerate_count": report.nondegenerate_count,
        "degenerate_count": report.degenerate_count,
        "bigon_count": report.bigon_count,
        "bigon_constant": report.bigon_constant,
        "triangles": [
            {"corners": list(c.corners), "D": c.D, "cost": c.cost}
            for c in report.triangle_costs
        ],
        "exact_sum": report.exact_sum,
        "closed_form_bound": report.closed_form_bound,
        "branch": report.branch,
        "ok": ok,
    }
    _emit(args, "\n".join(lines) + "\n", payload)
    return 0 if ok else 1


# --- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kerphi",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--config",
            default="df3",
            help="config file path, or a built-in fixture name"
            f" ({', '.join(FIXTURES)}); default df3",
        )
        p.add_argument(
            "--out",
            choices=("text", "json"),
            default="text",
            help="output format (default text)",
        )
        p.add_argument(
            "--bfs-budget",
            type=int,
            default=None,
            help="override the fallback distance search budget",
        )

    p_validate = sub.add_parser(
        "validate", help="check all subgroup tables and incidences"
    )
    common(p_validate)
    p_validate.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker threads for the subgroup checks (default 1)",
    )
    p_validate.set_defaults(handler=cmd_validate)

    p_tables = sub.add_parser("tables", help="dump the subgroup tables")
    common(p_tables)
    p_tables.set_defaults(handler=cmd_tables)

    p_triangle = sub.add_parser(
        "triangle", help="actualize one triangle from three kernel words"
    )
    common(p_triangle)
    p_triangle.add_argument("--a", default="", help="first corner word")
    p_triangle.add_argument("--b", default="", help="second corner word")
    p_triangle.add_argument("--c", default="", help="third corner word")
    p_triangle.set_defaults(handler=cmd_triangle)

    p_fill = sub.add_parser(
        "fill", help="span a kernel loop and price the filling"
    )
    common(p_fill)
    source = p_fill.add_mutually_exclusive_group(required=True)
    source.add_argument(
        "--loop", default=None, help="loop file, one letter per line"
    )
    source.add_argument(
        "--random",
        type=int,
        default=None,
        metavar="LENGTH",
        help="generate a seeded random loop of at most LENGTH letters",
    )
    p_fill.add_argument(
        "--seed", type=int, default=None, help="override the config seed"
    )
    p_fill.set_defaults(handler=cmd_fill)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
