"""
Copyright (c) fenchel-nec contributors.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
"""
import argparse
import logging
import os
import sys
import time
from concurrent.futures import TimeoutError
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import orjson
from pebble import ProcessPool
from sconf import Config
from tqdm import tqdm

from fenchel.catalog import TABLE1_INSTANCES, TABLE2_OPEN, OpenCase, RecipeFailure, certify, recipe_for
from fenchel.certificate import Certificate, MalformedCertificate, verify_certificate
from fenchel.homomorphism import RewritingError, SignatureMismatch
from fenchel.maps import (
    GroupFileError,
    InvolutionSystem,
    PreconditionError,
    corollary_check,
    hemi_construction,
    ingest_group,
    odd_identity_check,
    odd_word_certificate,
    perfect_route_check,
    rotations,
    string_c_group_note,
)
from fenchel.search import OrderCollapse, SearchContext, SearchExhausted
from fenchel.signature import (
    ADMISSIBLE_FUCHSIAN,
    NON_HYPERBOLIC,
    NotBordered,
    PeriodOutOfRange,
    SignatureSyntaxError,
    area_mu,
    bordered_surface_criterion,
    classify,
    linear_bordered_reading,
    parse_signature,
)

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger()

DEFAULTS = Path(__file__).parent / "fenchel" / "data" / "defaults.yaml"

EXIT_OK = 0
EXIT_MALFORMED = 1
EXIT_OPEN = 3
EXIT_FUCHSIAN = 4
EXIT_NON_HYPERBOLIC = 5
EXIT_SEARCH = 6
EXIT_VERIFY = 7
EXIT_PRECONDITION = 8

CERTIFIED = "certified"
OPEN = "open_table2"
FUCHSIAN = "fuchsian"
NON_HYP = "non_hyperbolic"
SEARCH_FAILED = "search_failed"
VERIFY_FAILED = "verify_failed"
MALFORMED = "malformed"

EXIT_CODES = {
    CERTIFIED: EXIT_OK,
    OPEN: EXIT_OPEN,
    FUCHSIAN: EXIT_FUCHSIAN,
    NON_HYP: EXIT_NON_HYPERBOLIC,
    SEARCH_FAILED: EXIT_SEARCH,
    VERIFY_FAILED: EXIT_VERIFY,
    MALFORMED: EXIT_MALFORMED,
}


@dataclass
class Outcome:
    signature: str
    status: str
    certificate: Optional[Certificate] = None
    reason: str = ""
    error: Optional[Dict[str, str]] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_dict(self) -> Dict[str, Any]:
        data = {"signature": self.signature, "status": self.status}
        if self.reason:
            data["reason"] = self.reason
        if self.error:
            data["error"] = self.error
        data.update(self.extra)
        if self.certificate is not None:
            data["certificate"] = self.certificate.to_dict()
        return data


def _error(stage: str, err: Exception) -> Dict[str, str]:
    return {"stage": stage, "error": type(err).__name__, "message": str(err)}


def run_signature(text: str, ctx: SearchContext, orientable: bool = False, both_conventions: bool = False) -> Outcome:
    """parse, classify, pick a recipe, instantiate it and re-verify the certificate."""
    stage = "parse"
    try:
        sig = parse_signature(text)
        stage = "classify"
        kind = classify(sig)
        extra = {"mu": str(area_mu(sig))}
        if both_conventions and sig.k:
            extra["bordered_kernel"] = {
                "cyclic": bordered_surface_criterion(sig),
                "linear": linear_bordered_reading(sig),
            }
        if kind == NON_HYPERBOLIC:
            return Outcome(str(sig), NON_HYP, reason="area is not positive", extra=extra)
        if kind == ADMISSIBLE_FUCHSIAN:
            return Outcome(str(sig), FUCHSIAN, reason="sign '+' and no period cycles", extra=extra)
        stage = "recipe"
        found = recipe_for(sig)
        if isinstance(found, OpenCase):
            return Outcome(str(sig), OPEN, reason=found.reason, extra=extra)
        stage = "instantiate"
        cert = certify(sig, ctx, orientable=orientable)
        stage = "verify"
        result = verify_certificate(cert)
        if not result:
            return Outcome(str(sig), VERIFY_FAILED, cert, error={"stage": stage, "error": "VerificationFailed", "message": ", ".join(result.failures)})
        return Outcome(str(sig), CERTIFIED, cert, extra=extra)
    except (SignatureSyntaxError, PeriodOutOfRange, NotBordered) as err:
        return Outcome(text, MALFORMED, error=_error(stage, err))
    except (SearchExhausted, OrderCollapse) as err:
        return Outcome(text, SEARCH_FAILED, error=_error(stage, err))
    except (RecipeFailure, SignatureMismatch, RewritingError) as err:
        return Outcome(text, VERIFY_FAILED, error=_error(stage, err))


def batch_row(text: str, settings: Dict[str, Any], orientable: bool) -> Dict[str, Any]:
    start = time.perf_counter()
    outcome = run_signature(text, SearchContext(**settings), orientable=orientable)
    cert = outcome.certificate
    row = {
        "signature": outcome.signature,
        "status": outcome.status,
        "recipe": cert.recipe if cert else None,
        "index": cert.image_order if cert else None,
        "genus": cert.kernel.get("genus") if cert else None,
        "seconds": round(time.perf_counter() - start, 4),
    }
    if outcome.reason:
        row["reason"] = outcome.reason
    if outcome.error:
        row["error"] = outcome.error
    return row


def _settings(ctx: SearchContext, *key) -> Dict[str, Any]:
    child = ctx.derive(*key)
    return {
        "seed": child.seed,
        "max_degree": child.max_degree,
        "max_attempts": child.max_attempts,
        "reflection_attempts": child.reflection_attempts,
        "euclid_modulus": child.euclid_modulus,
        "euclid_modulus_max": child.euclid_modulus_max,
        "lookup": child.lookup,
    }


def read_batch(path: Path) -> List[str]:
    lines = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return lines


def run_batch(lines: List[str], ctx: SearchContext, workers: int, timeout: Optional[float], orientable: bool = False) -> List[Dict[str, Any]]:
    """Rows in input order; each row searches under its own derived seed."""
    if workers <= 0:
        return [batch_row(text, _settings(ctx, "row", i, text), orientable) for i, text in enumerate(tqdm(lines))]
    rows: List[Optional[Dict[str, Any]]] = [None] * len(lines)
    with ProcessPool(max_workers=workers) as pool:
        tasks = {}
        for i, text in enumerate(lines):
            tasks[i] = pool.schedule(
                batch_row,
                args=[text, _settings(ctx, "row", i, text), orientable],
                timeout=timeout,
            )
        for i in tqdm(tasks):
            try:
                rows[i] = tasks[i].result()
                logger.info("%s: %s", rows[i]["signature"], rows[i]["status"])
            except TimeoutError:
                logger.warning("%s timed out", lines[i])
                rows[i] = {"signature": lines[i], "status": SEARCH_FAILED, "error": {"stage": "batch", "error": "TimeoutError", "message": f"no answer within {timeout} s"}}
            except Exception as err:
                logger.warning("%s: worker failed: %s", lines[i], err)
                rows[i] = {"signature": lines[i], "status": SEARCH_FAILED, "error": _error("batch", err)}
    return rows


def emit(data: Any, fmt: str):
    if fmt == "json":
        sys.stdout.write(orjson.dumps(data, option=orjson.OPT_INDENT_2).decode() + "\n")
        return
    if isinstance(data, list):
        for row in data:
            emit(row, fmt)
        return
    for key, value in data.items():
        if isinstance(value, (dict, list)):
            value = orjson.dumps(value).decode()
        sys.stdout.write(f"{key}: {value}\n")
    sys.stdout.write("\n")


def cmd_certify(args, config, ctx: SearchContext) -> int:
    if args.group is not None:
        return _certify_from_group(args, config)
    outcome = run_signature(args.signature, ctx, orientable=args.orientable, both_conventions=args.both_conventions)
    if outcome.certificate is not None and args.out is not None:
        outcome.certificate.save(args.out)
        logger.info("certificate written to %s", args.out)
    emit(outcome.to_dict(), config.format)
    return outcome.exit_code


def _certify_from_group(args, config) -> int:
    try:
        sig = parse_signature(args.signature)
        system = ingest_group(args.group)
        if not isinstance(system, InvolutionSystem):
            raise PreconditionError("an involution system (roles C0, C1, ...) is required")
        cert = odd_word_certificate(system, int(config.bfs_limit))
        if cert.signature != str(sig):
            raise PreconditionError(f"group file certifies {cert.signature}, not {sig}")
    except (SignatureSyntaxError, PeriodOutOfRange, GroupFileError) as err:
        emit({"signature": args.signature, "status": MALFORMED, "error": _error("input", err)}, config.format)
        return EXIT_MALFORMED
    except PreconditionError as err:
        emit({"signature": args.signature, "status": "precondition", "error": _error("maps", err)}, config.format)
        return EXIT_PRECONDITION
    result = verify_certificate(cert)
    if args.out is not None:
        cert.save(args.out)
    emit(Outcome(cert.signature, CERTIFIED if result else VERIFY_FAILED, cert).to_dict(), config.format)
    return EXIT_OK if result else EXIT_VERIFY


def cmd_batch(args, config, ctx: SearchContext) -> int:
    lines = read_batch(args.file)
    workers = args.workers if args.workers is not None else int(config.workers)
    rows = run_batch(lines, ctx, workers, config.get("row_timeout"), orientable=args.orientable)
    counts: Dict[str, int] = {}
    for row in rows:
        counts[row["status"]] = counts.get(row["status"], 0) + 1
    report = {"rows": rows, "counts": counts}
    if args.out is not None:
        Path(args.out).write_bytes(orjson.dumps(report, option=orjson.OPT_INDENT_2))
    emit(report if config.format == "json" else rows, config.format)
    return EXIT_OK


def cmd_verify(args, config, ctx: SearchContext) -> int:
    try:
        cert = Certificate.load(args.certificate)
        result = verify_certificate(cert)
    except MalformedCertificate as err:
        emit({"file": str(args.certificate), "verified": False, "error": _error("load", err)}, config.format)
        return EXIT_MALFORMED
    emit({"file": str(args.certificate), "signature": cert.signature, "verified": result.passed, "failures": result.failures}, config.format)
    return EXIT_OK if result else EXIT_VERIFY


def tables_report(ctx: SearchContext) -> Dict[str, Any]:
    certified, open_rows = [], []
    for row_id, sig in TABLE1_INSTANCES:
        outcome = run_signature(str(sig), ctx.derive("tables", row_id, str(sig)))
        cert = outcome.certificate
        certified.append(
            {
                "row": row_id,
                "signature": str(sig),
                "status": outcome.status,
                "recipe": cert.recipe if cert else None,
                "index": cert.image_order if cert else None,
                "notes": cert.notes if cert else [],
            }
        )
    for description, sig in TABLE2_OPEN:
        found = recipe_for(sig)
        status = found.status if isinstance(found, OpenCase) else "has_recipe"
        open_rows.append({"row": description, "signature": str(sig), "status": status})
    rows_ok = {r["row"] for r in certified if r["status"] == CERTIFIED and r["recipe"] == r["row"]}
    return {
        "table1": certified,
        "table2": open_rows,
        "table1_rows_certified": len(rows_ok),
        "table2_rows_open": sum(r["status"] == OPEN for r in open_rows),
    }


def cmd_tables(args, config, ctx: SearchContext) -> int:
    report = tables_report(ctx)
    emit(report, config.format)
    complete = report["table1_rows_certified"] == len({r for r, _ in TABLE1_INSTANCES})
    complete = complete and report["table2_rows_open"] == len(TABLE2_OPEN)
    return EXIT_OK if complete else EXIT_VERIFY


def cmd_check_group(args, config, ctx: SearchContext) -> int:
    bfs_limit = int(config.bfs_limit)
    try:
        system = ingest_group(args.file)
        if args.mode == "cor52":
            rotation = rotations(system) if isinstance(system, InvolutionSystem) else system
            report = corollary_check(rotation, int(config.z_search_limit)).to_dict()
            cert = None
        else:
            if not isinstance(system, InvolutionSystem):
                raise PreconditionError(f"mode {args.mode} needs an involution system (roles C0, C1, ...)")
            if args.mode == "prop51":
                result = odd_identity_check(system, bfs_limit)
                report = result.to_dict()
                report["string_c_group"] = string_c_group_note(system).to_dict()
                cert = odd_word_certificate(system, bfs_limit) if result.witness is not None else None
            elif args.mode == "hemi":
                hemi = hemi_construction(system, bfs_limit)
                report, cert = hemi.to_dict(), hemi.certificate
                if not hemi.applicable:
                    raise PreconditionError(hemi.note)
            else:
                perfect = perfect_route_check(system, bfs_limit)
                report, cert = perfect.to_dict(), perfect.certificate
    except GroupFileError as err:
        emit({"file": str(args.file), "error": _error("ingest", err), "problems": err.problems}, config.format)
        return EXIT_MALFORMED
    except PreconditionError as err:
        emit({"file": str(args.file), "mode": args.mode, "error": _error(args.mode, err)}, config.format)
        return EXIT_PRECONDITION
    report = {"file": str(args.file), "mode": args.mode, **report}
    if cert is not None:
        report["certificate_verified"] = verify_certificate(cert).passed
        if args.out is not None:
            cert.save(args.out)
    emit(report, config.format)
    return EXIT_OK


def load_config(args, left_argv: List[str]) -> Config:
    user = args.config or os.environ.get("FENCHEL_CONFIG")
    config = Config(user, default=str(DEFAULTS)) if user else Config(str(DEFAULTS))
    config.argv_update(left_argv)
    for name in ("seed", "max_degree", "max_attempts", "format"):
        value = getattr(args, name)
        if value is not None:
            setattr(config, name, value)
    return config


def get_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fenchel",
        description="Certify torsion-free normal subgroups of NEC groups that contain orientation-reversing elements.",
    )
    parser.add_argument("--config", type=str, default=None, help="YAML file overriding the defaults.")
    parser.add_argument("--seed", type=int, default=None, help="Root seed for quotient search.")
    parser.add_argument("--max-degree", dest="max_degree", type=int, default=None, help="Largest degree tried by random search.")
    parser.add_argument("--max-attempts", dest="max_attempts", type=int, default=None, help="Random tries per polygon request.")
    parser.add_argument("--format", choices=["json", "text"], default=None, help="Output format.")
    parser.add_argument("--both-conventions", dest="both_conventions", action="store_true", help="Report the bordered-kernel criterion under cyclic and linear adjacency.")
    parser.add_argument("--quiet", "-q", action="store_true", help="Only log warnings.")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log search details.")
    verbs = parser.add_subparsers(dest="verb", required=True)

    p = verbs.add_parser("certify", help="Certify one signature.")
    p.add_argument("signature", type=str, help="Signature such as '(1;+;[4];{(2)})'.")
    p.add_argument("--orientable", action="store_true", help="Certify the orientable kernel instead.")
    p.add_argument("--group", type=Path, default=None, help="Involution system file certifying the signature.")
    p.add_argument("--out", "-o", type=Path, default=None, help="Write the certificate here.")
    p.set_defaults(func=cmd_certify)

    p = verbs.add_parser("batch", help="Certify one signature per line.")
    p.add_argument("file", type=Path)
    p.add_argument("--workers", type=int, default=None, help="Worker processes, 0 runs inline.")
    p.add_argument("--orientable", action="store_true")
    p.add_argument("--out", "-o", type=Path, default=None, help="Write the report here.")
    p.set_defaults(func=cmd_batch)

    p = verbs.add_parser("verify", help="Re-verify a certificate file.")
    p.add_argument("certificate", type=Path)
    p.set_defaults(func=cmd_verify)

    p = verbs.add_parser("tables", help="Certify the g = 0, k = 1 table instances and list the open shapes.")
    p.set_defaults(func=cmd_tables)

    p = verbs.add_parser("check-group", help="Run a checker on an ingested group file.")
    p.add_argument("file", type=Path)
    p.add_argument("--mode", choices=["prop51", "cor52", "hemi", "perfect"], required=True)
    p.add_argument("--out", "-o", type=Path, default=None, help="Write the certificate, if any, here.")
    p.set_defaults(func=cmd_check_group)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = get_parser()
    args, left_argv = parser.parse_known_args(argv)
    if args.quiet:
        logger.setLevel(logging.WARNING)
    elif args.verbose:
        logger.setLevel(logging.DEBUG)
    config = load_config(args, left_argv)
    ctx = SearchContext.from_config(config)
    return args.func(args, config, ctx)


if __name__ == "__main__":
    sys.exit(main())
