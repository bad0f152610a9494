"""
Copyright (c) fenchel-nec contributors.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

Certificates: serialized records that a kernel is a torsion-free normal
subgroup of stated finite index which contains an orientation-reversing
element (or, for the orientable kind, consists of orientation-preserving
elements only). Every stored result is recomputed from the signature, the
images and the witness word alone by ``verify_certificate``.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import orjson

from fenchel.homomorphism import (
    AS_PRINTED,
    CombinedHomomorphism,
    Homomorphism,
    check_witness,
    combine,
    orientation_homomorphism,
    torsion_free_certificate,
    verify_relators,
)
from fenchel.perm import Perm
from fenchel.signature import (
    NON_HYPERBOLIC,
    NecSignature,
    SignatureSyntaxError,
    UnknownGenerator,
    Word,
    area_mu,
    classify,
    kernel_surface_data,
    orientation_character,
    parse_signature,
    parse_word,
)

SCHEMA = "fenchel-cert/1"
ORIENTATION_REVERSING = "orientation-reversing"
ORIENTABLE = "orientable"


class MalformedCertificate(ValueError):
    pass


# JSON shape of the nested fields
FIELD_TYPES = {
    "signature": str,
    "mu": str,
    "recipe": str,
    "degree": int,
    "images": dict,
    "image_order": int,
    "relators": dict,
    "torsion": list,
    "kernel": dict,
    "notes": list,
}


@dataclass
class Certificate:
    signature: str
    mu: str
    recipe: str
    degree: int
    images: Dict[str, List[int]]
    image_order: int
    relators: Dict[str, Any]
    torsion: List[Dict[str, Any]]
    witness: Optional[Dict[str, Any]]
    kernel: Dict[str, Any]
    kind: str = ORIENTATION_REVERSING
    normalization: str = AS_PRINTED
    notes: List[str] = field(default_factory=list)
    orientation_block: Optional[List[int]] = None
    version: str = SCHEMA

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "version": self.version,
            "kind": self.kind,
            "signature": self.signature,
            "mu": self.mu,
            "recipe": self.recipe,
            "normalization": self.normalization,
            "notes": list(self.notes),
            "degree": self.degree,
            "images": self.images,
            "image_order": self.image_order,
            "relators": self.relators,
            "torsion": self.torsion,
            "witness": self.witness,
            "kernel": self.kernel,
        }
        if self.orientation_block is not None:
            data["orientation_block"] = self.orientation_block
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Certificate":
        if not isinstance(data, dict):
            raise MalformedCertificate("certificate must be a JSON object")
        if data.get("version") != SCHEMA:
            raise MalformedCertificate(f"unsupported version {data.get('version')!r}")
        required = ["signature", "mu", "recipe", "degree", "images", "image_order", "relators", "torsion", "kernel"]
        missing = [k for k in required if k not in data]
        if missing:
            raise MalformedCertificate(f"missing fields: {', '.join(missing)}")
        problems = [f"{k}: expected {kind.__name__}" for k, kind in FIELD_TYPES.items() if k in data and not isinstance(data[k], kind)]
        for k, kind in (("witness", dict), ("orientation_block", list)):
            if data.get(k) is not None and not isinstance(data[k], kind):
                problems.append(f"{k}: expected {kind.__name__} or null")
        if isinstance(data["torsion"], list):
            problems += [f"torsion[{i}]: expected object" for i, row in enumerate(data["torsion"]) if not isinstance(row, dict)]
        if isinstance(data["images"], dict):
            problems += [f"images.{g}: expected a list" for g, p in data["images"].items() if not isinstance(p, list)]
        if problems:
            raise MalformedCertificate("; ".join(problems))
        known = set(required) | {"version", "kind", "normalization", "notes", "witness", "orientation_block"}
        return cls(**{k: v for k, v in data.items() if k in known})

    def dumps(self) -> bytes:
        return orjson.dumps(self.to_dict(), option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS)

    @classmethod
    def loads(cls, raw: Union[bytes, str]) -> "Certificate":
        try:
            data = orjson.loads(raw)
        except orjson.JSONDecodeError as err:
            raise MalformedCertificate(f"invalid JSON: {err}") from err
        return cls.from_dict(data)

    def save(self, path: Path):
        Path(path).write_bytes(self.dumps())

    @classmethod
    def load(cls, path: Path) -> "Certificate":
        return cls.loads(Path(path).read_bytes())


def _kernel_record(sig: NecSignature, index: int, orientable: bool) -> Dict[str, Any]:
    if classify(sig) == NON_HYPERBOLIC:
        return {"applicable": False, "mu": None, "orientable": orientable, "genus": None, "consistent": None}
    data = kernel_surface_data(area_mu(sig), index, orientable)
    return {
        "applicable": True,
        "mu": str(data.mu),
        "orientable": orientable,
        "genus": data.genus,
        "consistent": data.consistent,
    }


def _witness_record(h: Homomorphism, w: Word) -> Dict[str, Any]:
    return {
        "word": str(w),
        "character": orientation_character(h.signature, w),
        "identity": h.evaluate(w).is_identity,
    }


def build_certificate(
    h: Homomorphism,
    recipe: str,
    witness: Optional[Word],
    normalization: str = AS_PRINTED,
    notes: Optional[List[str]] = None,
    kind: str = ORIENTATION_REVERSING,
    orientation_block: Optional[List[int]] = None,
) -> Certificate:
    """
    Record a homomorphism and its checks.

    Args:
        h: The homomorphism whose kernel is certified.
        recipe: Stable id of the construction that produced ``h``.
        witness: Orientation-reversing kernel element; None for the orientable kind.
        normalization: Convention variant under which the images were accepted.
        notes: Free-form remarks, such as which branch of a construction applied.
        kind: ``orientation-reversing`` or ``orientable``.
        orientation_block: For the orientable kind, two 1-based points swapped
            exactly by the orientation-reversing generators.

    Returns:
        Certificate: The record, not yet checked; see ``verify_certificate``.
    """
    relators = verify_relators(h)
    torsion = torsion_free_certificate(h)
    index = h.index()
    return Certificate(
        signature=str(h.signature),
        mu=str(area_mu(h.signature)),
        recipe=recipe,
        degree=h.degree,
        images={g.name: p.to_list() for g, p in h.images.items()},
        image_order=index,
        relators={"passed": relators.passed, "failed": relators.failed},
        torsion=[
            {"source": r.source, "required": r.required, "achieved": r.achieved, "passed": r.passed}
            for r in torsion.rows
        ],
        witness=_witness_record(h, witness) if witness is not None else None,
        kernel=_kernel_record(h.signature, index, kind == ORIENTABLE),
        kind=kind,
        normalization=normalization,
        notes=list(notes or []),
        orientation_block=orientation_block,
    )


def orientable_surface_kernel(h: Homomorphism, recipe: str = "3/orientable", notes: Optional[List[str]] = None) -> Certificate:
    """
    Certificate for the kernel of ``h`` times the orientation character. That
    kernel is torsion-free whenever ``h`` preserves all torsion orders, and it
    consists of orientation-preserving elements only.
    """
    omega = orientation_homomorphism(h.signature)
    joint: CombinedHomomorphism = combine([h, omega])
    block = [joint.degree - 1, joint.degree]
    index, base = joint.index(), h.index()
    remarks = list(notes or [])
    remarks.append("index doubled by the orientation factor" if index == 2 * base else "orientation character factors through the map")
    return build_certificate(joint, recipe, None, notes=remarks, kind=ORIENTABLE, orientation_block=block)


@dataclass
class VerificationResult:
    failures: List[str]

    @property
    def passed(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.passed


def _rebuild(cert: Certificate) -> Homomorphism:
    try:
        sig = parse_signature(cert.signature)
    except (SignatureSyntaxError, ValueError) as err:
        raise MalformedCertificate(f"bad signature: {err}") from err
    if not isinstance(cert.images, dict):
        raise MalformedCertificate("images must be an object")
    images = {}
    for name, arr in cert.images.items():
        if not isinstance(arr, list) or len(arr) != cert.degree:
            raise MalformedCertificate(f"image of {name} is not an array of length {cert.degree}")
        try:
            images[name] = Perm.from_images(arr)
        except (TypeError, ValueError) as err:
            raise MalformedCertificate(f"image of {name} is not a permutation") from err
    try:
        return Homomorphism(sig, images, degree=cert.degree)
    except (KeyError, ValueError) as err:
        raise MalformedCertificate(f"images do not match {sig}: {err}") from err


def verify_certificate(cert: Certificate) -> VerificationResult:
    """
    Recompute every check from the signature, raw images and witness word.

    Returns:
        VerificationResult: Truthy iff each recomputed check passes and agrees
        with the stored value; ``failures`` names the checks that did not.

    Raises:
        MalformedCertificate: If the record cannot be interpreted at all.
    """
    h = _rebuild(cert)
    sig = h.signature
    failures = []
    if cert.mu != str(area_mu(sig)):
        failures.append("mu")

    relators = verify_relators(h)
    if not relators.passed or cert.relators.get("passed") is not True:
        failures.append("relators")

    torsion = torsion_free_certificate(h)
    stored = [(t.get("source"), t.get("required"), t.get("achieved")) for t in cert.torsion]
    if not torsion.passed or stored != [(r.source, r.required, r.achieved) for r in torsion.rows]:
        failures.append("torsion")

    index = h.index()
    if index != cert.image_order:
        failures.append("image_order")

    if cert.kind == ORIENTATION_REVERSING:
        if not cert.witness or "word" not in cert.witness:
            failures.append("witness")
        else:
            try:
                w = parse_word(cert.witness["word"], sig)
            except (SignatureSyntaxError, UnknownGenerator, ValueError) as err:
                raise MalformedCertificate(f"bad witness word: {err}") from err
            if not check_witness(h, w) or cert.witness != _witness_record(h, w):
                failures.append("witness")
    elif cert.kind == ORIENTABLE:
        if not _orientation_block_holds(h, cert.orientation_block):
            failures.append("orientation_block")
    else:
        raise MalformedCertificate(f"unknown kind {cert.kind!r}")

    if cert.kernel != _kernel_record(sig, index, cert.kind == ORIENTABLE):
        failures.append("kernel")
    elif cert.kernel.get("applicable") and not cert.kernel.get("consistent"):
        failures.append("kernel")

    if failures:
        logging.info("certificate for %s failed: %s", cert.signature, ", ".join(failures))
    return VerificationResult(failures)


def _orientation_block_holds(h: Homomorphism, block: Optional[List[int]]) -> bool:
    if not block or len(block) != 2:
        return False
    p, q = block[0] - 1, block[1] - 1
    if not (0 <= p < h.degree and 0 <= q < h.degree) or p == q:
        return False
    for gen, image in h.images.items():
        swaps = image(p) == q and image(q) == p
        fixes = image(p) == p and image(q) == q
        if not (swaps if gen.reverses_orientation else fixes):
            return False
    return True
