"""Command-line interface.

Subcommands: map, barycenter, adapt, distance, audit, plot. Exit codes:
0 success, 1 usage error, 2 data error, 3 audit failure. Outputs are
deterministic: the same inputs and flags produce byte-identical bytes.

The default map path can come from the BARYMAP_MAP environment variable, and
any long flag can be supplied as a `name=value` line in a --config file;
explicit flags win over config values, which win over the environment.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .analysis import (
    DEFAULT_SCALE_FACTORS,
    SCALE_DRIFT_TOLERANCE,
    NormalizationAudit,
    Representation,
    ScaleAudit,
    format_significant,
    normalization_audit,
    pairwise_distances,
    report_to_csv,
    report_to_json,
    scale_invariance_audit,
)
from .core import NormalizationMode, barycenter_2d, similarity_adapt
from .errors import DataError
from .map_io import (
    OverlayMap,
    ProfileLoadResult,
    PublicationProfile,
    UnitKind,
    extract_overlay_map,
    load_profiles_csv,
    parse_pajek,
    read_map_json,
    validate_similarity_matrix,
    write_map_json,
)
from .plot import PlotSpec, render_overlay_svg

ENV_MAP_PATH = "BARYMAP_MAP"
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_AUDIT = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage problems, but 2 is our data-error
    # code, so route usage failures through our own exception instead.
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# flag/config value converters (shared by argparse and the config file)
# ---------------------------------------------------------------------------


def _choice(name: str, allowed: tuple[str, ...]) -> Callable[[str], str]:
    def convert(text: str) -> str:
        token = text.strip().replace("-", "_")
        if token not in allowed:
            raise argparse.ArgumentTypeError(
                f"{name} must be one of {', '.join(allowed)}; got {text!r}"
            )
        return token

    return convert


_policy_arg = _choice("matrix policy", ("strict", "symmetrize"))
_unknown_arg = _choice("unknown-category policy", ("error", "skip"))
_format_arg = _choice("format", ("csv", "json"))
_aggregation_arg = _choice("aggregation", ("per_member", "pooled"))
_rep_kind_arg = _choice("representation", ("barycenter2d", "adapted"))


def _mode_arg(text: str) -> NormalizationMode:
    try:
        return NormalizationMode(text.strip().replace("-", "_"))
    except ValueError:
        allowed = ", ".join(m.value for m in NormalizationMode)
        raise argparse.ArgumentTypeError(
            f"mode must be one of {allowed}; got {text!r}"
        ) from None


def _representations_arg(text: str) -> tuple[Representation, ...]:
    tokens = [tok.strip() for tok in text.split(",") if tok.strip()]
    if not tokens:
        raise argparse.ArgumentTypeError("representations list is empty")
    try:
        return tuple(Representation.parse(tok) for tok in tokens)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _scales_arg(text: str) -> tuple[float, ...]:
    try:
        factors = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"scales must be comma-separated numbers; got {text!r}"
        ) from None
    if not factors:
        raise argparse.ArgumentTypeError("scales list is empty")
    if any(not f > 0 for f in factors):
        raise argparse.ArgumentTypeError("scale factors must be strictly positive")
    return factors


def _digits_arg(text: str) -> int:
    try:
        digits = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("digits must be an integer") from None
    if not 1 <= digits <= 25:
        raise argparse.ArgumentTypeError("digits must be between 1 and 25")
    return digits


def _positive_int_arg(name: str) -> Callable[[str], int]:
    def convert(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if value <= 0:
            raise argparse.ArgumentTypeError(f"{name} must be > 0")
        return value

    return convert


def _float_arg(name: str) -> Callable[[str], float]:
    def convert(text: str) -> float:
        try:
            return float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number") from None

    return convert


def _bool_arg(text: str) -> bool:
    token = text.strip().lower()
    if token in ("1", "true", "yes", "on"):
        return True
    if token in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


# config key -> (args attribute, converter for config-file strings)
_KEYS: Mapping[str, tuple[str, Callable[[str], object]]] = {
    "map": ("map_path", str),
    "profiles": ("profiles_path", str),
    "network": ("network", str),
    "matrix-policy": ("matrix_policy", _policy_arg),
    "unknown-category": ("unknown_policy", _unknown_arg),
    "format": ("output_format", _format_arg),
    "output": ("output_path", str),
    "digits": ("digits", _digits_arg),
    "mode": ("mode", _mode_arg),
    "representation": ("representation_kind", _rep_kind_arg),
    "aggregation": ("aggregation", _aggregation_arg),
    "representations": ("representations", _representations_arg),
    "scales": ("scales", _scales_arg),
    "tolerance": ("tolerance", _float_arg("tolerance")),
    "scale-audit": ("scale_audit", _bool_arg),
    "normalization-audit": ("normalization_audit", _bool_arg),
    "width": ("width", _positive_int_arg("width")),
    "height": ("height", _positive_int_arg("height")),
    "plot-margin": ("plot_margin", _float_arg("plot-margin")),
    "labels": ("labels", _bool_arg),
}

_DEFAULTS: Mapping[str, object] = {
    "map": None,
    "profiles": None,
    "network": None,
    "matrix-policy": "strict",
    "unknown-category": "error",
    "format": "csv",
    "output": "-",
    "digits": 17,
    "mode": NormalizationMode.BY_TOTAL,
    "representation": "barycenter2d",
    "aggregation": "per_member",
    "representations": None,
    "scales": DEFAULT_SCALE_FACTORS,
    "tolerance": SCALE_DRIFT_TOLERANCE,
    "scale-audit": True,
    "normalization-audit": None,
    "width": 900,
    "height": 700,
    "plot-margin": 48.0,
    "labels": False,
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run parameters for one subcommand invocation."""

    command: str
    map_path: str | None
    profiles_path: str | None
    network: str | None
    matrix_policy: str
    unknown_policy: str
    output_format: str
    output_path: str
    digits: int
    mode: NormalizationMode
    representation_kind: str
    aggregation: str
    representations: tuple[Representation, ...] | None
    scales: tuple[float, ...]
    tolerance: float
    scale_audit: bool
    normalization_audit: bool | None
    width: int
    height: int
    plot_margin: float
    labels: bool


# ---------------------------------------------------------------------------
# parser construction
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(
        prog="barymap",
        description=(
            "Barycenters of publication profiles on a science overlay map: "
            "parse maps, place units, compare research groups with panels, "
            "audit normalizations, and render SVG overlays."
        ),
        epilog=(
            f"The {ENV_MAP_PATH} environment variable supplies a default "
            f"--map path. --config points at a key=value file whose keys "
            f"match the long flag names; explicit flags override it."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--map", "-m", dest="map_path", help="map file (.paj or map JSON; '-' for stdin)")
    common.add_argument("--network", help="Pajek network name to extract")
    common.add_argument(
        "--matrix-policy",
        dest="matrix_policy",
        type=_policy_arg,
        help="similarity validation policy: strict or symmetrize",
    )
    common.add_argument("--config", dest="config_path", help="key=value config file")
    common.add_argument(
        "--output", "-o", dest="output_path", help="output path ('-' for stdout)"
    )
    common.add_argument(
        "--digits", type=_digits_arg, help="significant digits in CSV output"
    )

    profiled = argparse.ArgumentParser(add_help=False)
    profiled.add_argument(
        "--profiles", "-p", dest="profiles_path", help="profile CSV ('-' for stdin)"
    )
    profiled.add_argument(
        "--unknown-category",
        dest="unknown_policy",
        type=_unknown_arg,
        help="unknown category policy: error or skip",
    )

    formatted = argparse.ArgumentParser(add_help=False)
    formatted.add_argument(
        "--format", dest="output_format", type=_format_arg, help="csv or json"
    )

    sub.add_parser(
        "map",
        parents=[common],
        help="parse and validate a map, emit map JSON",
    )
    sub.add_parser(
        "barycenter",
        parents=[common, profiled, formatted],
        help="2-D barycenter per unit",
    )
    p_adapt = sub.add_parser(
        "adapt",
        parents=[common, profiled, formatted],
        help="similarity-adapted vector per unit",
    )
    p_adapt.add_argument(
        "--mode", type=_mode_arg, help="raw, by-total, or by-adapted-sum"
    )
    p_distance = sub.add_parser(
        "distance",
        parents=[common, profiled, formatted],
        help="distance report: research groups vs panel members",
    )
    p_distance.add_argument(
        "--representation",
        dest="representation_kind",
        type=_rep_kind_arg,
        help="barycenter2d or adapted",
    )
    p_distance.add_argument(
        "--mode", type=_mode_arg, help="normalization mode for adapted"
    )
    p_distance.add_argument(
        "--aggregation",
        type=_aggregation_arg,
        help="per-member or pooled panel",
    )
    p_audit = sub.add_parser(
        "audit",
        parents=[common, profiled, formatted],
        help="scale-invariance and normalization audits",
    )
    p_audit.add_argument(
        "--representations",
        "--representation",
        dest="representations",
        type=_representations_arg,
        help="comma list, e.g. barycenter2d,adapted(raw),adapted(by-total)",
    )
    p_audit.add_argument(
        "--scales", type=_scales_arg, help="comma list of positive scale factors"
    )
    p_audit.add_argument(
        "--tolerance", type=_float_arg("tolerance"), help="max allowed drift"
    )
    p_audit.add_argument(
        "--scale-audit",
        dest="scale_audit",
        action=argparse.BooleanOptionalAction,
        help="run the scale-invariance audit (default on)",
    )
    p_audit.add_argument(
        "--normalization-audit",
        dest="normalization_audit",
        action=argparse.BooleanOptionalAction,
        help="run the coordinate-sum audit (default: when similarity present)",
    )
    p_plot = sub.add_parser(
        "plot",
        parents=[common, profiled],
        help="render the map and unit barycenters as SVG",
    )
    p_plot.add_argument("--width", type=_positive_int_arg("width"))
    p_plot.add_argument("--height", type=_positive_int_arg("height"))
    p_plot.add_argument(
        "--plot-margin", dest="plot_margin", type=_float_arg("plot-margin")
    )
    p_plot.add_argument(
        "--labels",
        action=argparse.BooleanOptionalAction,
        help="draw category and unit labels",
    )
    return parser


def _load_config_file(path: str) -> dict[str, str]:
    if path == "-":
        raise DataError("config file cannot come from stdin")
    text = _decode(_read_bytes(path))
    entries: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise DataError(f"config line {line_no}: expected key=value")
        key = key.strip()
        if key not in _KEYS:
            raise DataError(f"config line {line_no}: unknown key {key!r}")
        entries[key] = value.strip()
    return entries


def _resolve(args: argparse.Namespace) -> RunConfig:
    config_path = getattr(args, "config_path", None)
    config = _load_config_file(config_path) if config_path else {}

    resolved: dict[str, object] = {}
    for key, (dest, convert) in _KEYS.items():
        value = getattr(args, dest, None)
        if value is None and key in config:
            try:
                value = convert(config[key])
            except argparse.ArgumentTypeError as exc:
                raise DataError(f"config key {key!r}: {exc}") from None
        if value is None and key == "map":
            value = os.environ.get(ENV_MAP_PATH) or None
        if value is None:
            value = _DEFAULTS[key]
        resolved[dest] = value

    return RunConfig(command=args.command, **resolved)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# I/O helpers
# ---------------------------------------------------------------------------


def _read_bytes(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as handle:
        return handle.read()


def _decode(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        return data.decode("latin-1")


def _write_output(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _require_map_path(cfg: RunConfig) -> str:
    if cfg.map_path is None:
        raise _UsageError(
            f"barymap {cfg.command}: --map is required (flag, config file, "
            f"or {ENV_MAP_PATH})"
        )
    return cfg.map_path


def _require_profiles_path(cfg: RunConfig) -> str:
    if cfg.profiles_path is None:
        raise _UsageError(f"barymap {cfg.command}: --profiles is required")
    return cfg.profiles_path


def _load_map(cfg: RunConfig) -> OverlayMap:
    text = _decode(_read_bytes(_require_map_path(cfg)))
    stripped = text.lstrip()
    if stripped.startswith("{"):
        overlay_map = read_map_json(text)
    else:
        overlay_map = extract_overlay_map(parse_pajek(text), cfg.network)
    if overlay_map.similarity is not None:
        validated = validate_similarity_matrix(
            overlay_map.similarity, cfg.matrix_policy
        )
        overlay_map = OverlayMap(
            categories=overlay_map.categories, similarity=validated
        )
    return overlay_map


def _load_profiles(cfg: RunConfig, overlay_map: OverlayMap) -> ProfileLoadResult:
    text = _decode(_read_bytes(_require_profiles_path(cfg)))
    result = load_profiles_csv(text, overlay_map, cfg.unknown_policy)
    if result.skipped_rows:
        print(
            f"warning: skipped {result.skipped_rows} row(s) with unknown "
            f"categories",
            file=sys.stderr,
        )
    return result


def _csv_text(rows: Sequence[Sequence[object]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerows(rows)
    return out.getvalue()


def _split_families(
    profiles: Sequence[PublicationProfile],
) -> tuple[list[PublicationProfile], list[PublicationProfile]]:
    groups = [p for p in profiles if p.kind is UnitKind.RESEARCH_GROUP]
    panel = [p for p in profiles if p.kind is UnitKind.PANEL_MEMBER]
    if not groups:
        raise DataError("profiles contain no research_group units")
    if not panel:
        raise DataError("profiles contain no panel_member units")
    return groups, panel


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_map(cfg: RunConfig) -> int:
    _write_output(cfg.output_path, write_map_json(_load_map(cfg)))
    return EXIT_OK


def _cmd_barycenter(cfg: RunConfig) -> int:
    overlay_map = _load_map(cfg)
    profiles = _load_profiles(cfg, overlay_map).profiles
    points = [(p, barycenter_2d(p, overlay_map)) for p in profiles]
    if cfg.output_format == "csv":
        rows: list[Sequence[object]] = [("unit_id", "kind", "c1", "c2")]
        rows += [
            (
                p.unit_id,
                p.kind.value,
                format_significant(point.c1, cfg.digits),
                format_significant(point.c2, cfg.digits),
            )
            for p, point in points
        ]
        text = _csv_text(rows)
    else:
        text = (
            json.dumps(
                [
                    {
                        "unit_id": p.unit_id,
                        "kind": p.kind.value,
                        "c1": point.c1,
                        "c2": point.c2,
                    }
                    for p, point in points
                ],
                indent=2,
            )
            + "\n"
        )
    _write_output(cfg.output_path, text)
    return EXIT_OK


def _cmd_adapt(cfg: RunConfig) -> int:
    overlay_map = _load_map(cfg)
    if overlay_map.similarity is None:
        raise DataError("map has no similarity matrix; cannot adapt profiles")
    profiles = _load_profiles(cfg, overlay_map).profiles
    vectors = [
        (p, similarity_adapt(p, overlay_map.similarity, cfg.mode))
        for p in profiles
    ]
    if cfg.output_format == "csv":
        header = ["unit_id", "kind", "mode"] + [
            c.label for c in overlay_map.categories
        ]
        rows: list[Sequence[object]] = [header]
        rows += [
            [p.unit_id, p.kind.value, vector.mode.value]
            + [format_significant(v, cfg.digits) for v in vector.values.tolist()]
            for p, vector in vectors
        ]
        text = _csv_text(rows)
    else:
        text = (
            json.dumps(
                [
                    {
                        "unit_id": p.unit_id,
                        "kind": p.kind.value,
                        "mode": vector.mode.value,
                        "values": vector.values.tolist(),
                    }
                    for p, vector in vectors
                ],
                indent=2,
            )
            + "\n"
        )
    _write_output(cfg.output_path, text)
    return EXIT_OK


def _cmd_distance(cfg: RunConfig) -> int:
    overlay_map = _load_map(cfg)
    profiles = _load_profiles(cfg, overlay_map).profiles
    groups, panel = _split_families(profiles)
    if cfg.representation_kind == "barycenter2d":
        representation = Representation.barycenter2d()
    else:
        representation = Representation.adapted(cfg.mode)
    report = pairwise_distances(
        groups, panel, overlay_map, representation, cfg.aggregation
    )
    if cfg.output_format == "csv":
        text = report_to_csv(report, cfg.digits)
    else:
        text = report_to_json(report)
    _write_output(cfg.output_path, text)
    return EXIT_OK


def _audit_rows(
    cfg: RunConfig,
    scale_audits: Sequence[ScaleAudit],
    norm_audits: Sequence[NormalizationAudit],
    representations: Sequence[Representation],
) -> list[Sequence[object]]:
    rows: list[Sequence[object]] = [
        ("unit_id", "check", "representation", "value", "threshold", "status")
    ]
    for audit in scale_audits:
        for representation in representations:
            label = representation.label
            if audit.passed[label]:
                status = "pass"
            elif audit.expected_invariant[label]:
                status = "fail"
            else:
                status = "expected_fail"
            rows.append(
                (
                    audit.unit_id,
                    "scale_invariance",
                    label,
                    format_significant(audit.max_drift[label], cfg.digits),
                    format_significant(audit.tolerance, cfg.digits),
                    status,
                )
            )
    for audit in norm_audits:
        rows.append(
            (
                audit.unit_id,
                "normalization",
                "adapted(by_total)",
                format_significant(audit.coordinate_sum, cfg.digits),
                "",
                "info",
            )
        )
    return rows


def _cmd_audit(cfg: RunConfig) -> int:
    overlay_map = _load_map(cfg)
    profiles = _load_profiles(cfg, overlay_map).profiles

    if cfg.representations is not None:
        representations = list(cfg.representations)
    elif overlay_map.similarity is not None:
        representations = [Representation.barycenter2d()] + [
            Representation.adapted(mode) for mode in NormalizationMode
        ]
    else:
        representations = [Representation.barycenter2d()]
    if overlay_map.similarity is None and any(
        r.kind == "adapted" for r in representations
    ):
        raise DataError(
            "map has no similarity matrix; adapted representations cannot "
            "be audited"
        )

    run_normalization = cfg.normalization_audit
    if run_normalization is None:
        run_normalization = overlay_map.similarity is not None
    if run_normalization and overlay_map.similarity is None:
        raise DataError("normalization audit requires a similarity matrix")

    scale_audits = (
        [
            scale_invariance_audit(
                profile, overlay_map, representations, cfg.scales, cfg.tolerance
            )
            for profile in profiles
        ]
        if cfg.scale_audit
        else []
    )
    norm_audits = (
        [normalization_audit(profile, overlay_map.similarity) for profile in profiles]
        if run_normalization
        else []
    )
    failures = [
        f"{audit.unit_id}: {representation.label}"
        for audit in scale_audits
        for representation in representations
        if audit.expected_invariant[representation.label]
        and not audit.passed[representation.label]
    ]

    if cfg.output_format == "csv":
        text = _csv_text(_audit_rows(cfg, scale_audits, norm_audits, representations))
    else:
        doc = {
            "tolerance": cfg.tolerance,
            "scale_factors": list(cfg.scales),
            "representations": [r.label for r in representations],
            "units": [
                {
                    "unit_id": profile.unit_id,
                    "scale": (
                        {
                            label: {
                                "max_drift": audit.max_drift[label],
                                "drift_by_factor": {
                                    repr(factor): drift
                                    for factor, drift in audit.drift_by_factor[
                                        label
                                    ].items()
                                },
                                "passed": audit.passed[label],
                                "expected_invariant": audit.expected_invariant[
                                    label
                                ],
                            }
                            for label in (r.label for r in representations)
                        }
                        if cfg.scale_audit
                        else None
                    ),
                    "normalization": (
                        {
                            "coordinate_sum": norm.coordinate_sum,
                            "deviation": norm.deviation,
                        }
                        if run_normalization
                        else None
                    ),
                }
                for profile, audit, norm in zip(
                    profiles,
                    scale_audits or [None] * len(profiles),
                    norm_audits or [None] * len(profiles),
                )
            ],
            "failures": failures,
        }
        text = json.dumps(doc, indent=2) + "\n"
    _write_output(cfg.output_path, text)
    return EXIT_AUDIT if failures else EXIT_OK


def _cmd_plot(cfg: RunConfig) -> int:
    overlay_map = _load_map(cfg)
    markers = []
    if cfg.profiles_path is not None:
        profiles = _load_profiles(cfg, overlay_map).profiles
        markers = [
            (p.unit_id, p.kind, barycenter_2d(p, overlay_map)) for p in profiles
        ]
    spec = PlotSpec(
        width=cfg.width,
        height=cfg.height,
        margin=cfg.plot_margin,
        show_labels=cfg.labels,
    )
    _write_output(cfg.output_path, render_overlay_svg(overlay_map, markers, spec))
    return EXIT_OK


_HANDLERS: Mapping[str, Callable[[RunConfig], int]] = {
    "map": _cmd_map,
    "barycenter": _cmd_barycenter,
    "adapt": _cmd_adapt,
    "distance": _cmd_distance,
    "audit": _cmd_audit,
    "plot": _cmd_plot,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else 0
    try:
        cfg = _resolve(args)
        return _HANDLERS[cfg.command](cfg)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
