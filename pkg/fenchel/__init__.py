"""
Copyright (c) fenchel-nec contributors.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
"""
from .signature import NecSignature, parse_signature, area_mu, classify
from .perm import Perm, PermGroup, FiniteGroupSpec
from .homomorphism import Homomorphism, verify_relators, torsion_free_certificate
from .certificate import Certificate, verify_certificate
from .search import SearchContext, SearchExhausted
from .catalog import OpenCase, RecipeFailure, certify, instantiate, recipe_for
from ._version import __version__

__all__ = [
    "NecSignature",
    "parse_signature",
    "area_mu",
    "classify",
    "Perm",
    "PermGroup",
    "FiniteGroupSpec",
    "Homomorphism",
    "verify_relators",
    "torsion_free_certificate",
    "Certificate",
    "verify_certificate",
    "SearchContext",
    "SearchExhausted",
    "OpenCase",
    "RecipeFailure",
    "certify",
    "instantiate",
    "recipe_for",
]
