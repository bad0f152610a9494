import orjson
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fenchel import maps
from fenchel.certificate import verify_certificate
from fenchel.maps import (
    GroupFileError,
    InvolutionSystem,
    PreconditionError,
    RotationSystem,
    corollary_check,
    group_from_record,
    hemi_construction,
    ingest_group,
    odd_identity_check,
    odd_word_certificate,
    parity_bfs,
    perfect_route_check,
    rotations,
    string_c_group_note,
)
from fenchel.perm import DegreeLimitExceeded, Perm, PermGroup, is_perfect


def cyc(text, degree=4):
    return Perm.from_cycles(text, degree)


def test_system_signature(s4_system):
    assert str(s4_system.signature()) == "(0;+;[-];{(2,3,4)})"
    assert s4_system.s == 3
    assert s4_system.group.order() == 24


def test_create_reports_every_problem():
    with pytest.raises(GroupFileError) as info:
        InvolutionSystem.create([cyc("(1 2 3)"), cyc("(1 2)")], [3, 5])
    assert len(info.value.problems) == 3
    with pytest.raises(GroupFileError):
        InvolutionSystem.create([cyc("(1 2)")], [2])


@pytest.mark.parametrize("name, expected", [("s3_system", False), ("s4_system", True), ("klein_system", True)])
def test_odd_identity(request, parity_oracle, name, expected):
    system = request.getfixturevalue(name)
    result = odd_identity_check(system)
    assert result.holds is expected
    assert result.holds == parity_oracle(list(system.involutions))
    if expected:
        assert result.index == 1
        assert len(result.witness) % 2 == 1
    else:
        assert result.index == 2 and result.witness is None


def test_odd_identity_above_bound(s4_system):
    result = odd_identity_check(s4_system, bfs_limit=10)
    assert result.holds and result.witness is None
    assert "witness not extracted" in result.to_dict()["note"]


def test_parity_bfs_shortest_word(klein_system):
    letters = [(j, c, True) for j, c in enumerate(klein_system.involutions)]
    assert sorted(parity_bfs(4, letters)) == [0, 1, 2]
    with pytest.raises(DegreeLimitExceeded):
        parity_bfs(4, [(0, cyc("(1 2 3 4)"), False), (1, cyc("(1 2)"), False)], limit=3)
    assert parity_bfs(4, [(0, cyc("(1 2)"), True)]) is None


def test_rotation_form(s4_system):
    rot = rotations(s4_system)
    assert rot.orders == (2, 3, 4)
    assert rot.z == s4_system.involutions[0]


def test_corollary_klein(klein_system):
    result = corollary_check(rotations(klein_system))
    assert result.holds
    assert result.z == klein_system.involutions[0]
    assert (result.exact, result.loose) == (1, 4)


def test_corollary_agrees_with_odd_check(s3_system, s4_system):
    assert corollary_check(rotations(s3_system)).holds is False
    assert corollary_check(rotations(s4_system)).holds is True


def test_corollary_undecided(klein_system):
    result = corollary_check(rotations(klein_system), z_search_limit=3)
    assert result.holds is None
    assert result.to_dict()["note"].startswith("undecided at bound")


def test_rotation_system_validation():
    t = cyc("(1 2 3)")
    assert RotationSystem.create([t, t.inverse()], [3, 3]).group.order() == 3
    with pytest.raises(GroupFileError):
        RotationSystem.create([t, t], [3, 3])
    with pytest.raises(GroupFileError):
        RotationSystem.create([t, t.inverse()], [3, 2])


def test_hemi_construction(s4_system):
    report = hemi_construction(s4_system)
    assert (report.s, report.n) == (3, 2)
    assert report.normal_order == 4 and report.quotient_order == 6
    assert report.applicable
    cert = report.certificate
    assert cert.recipe == "5.2/hemi"
    assert cert.signature == "(0;+;[-];{(2,2,2)})"
    assert verify_certificate(cert)
    assert report.to_dict()["certified"]


def test_hemi_needs_type(s3_system):
    with pytest.raises(PreconditionError):
        hemi_construction(s3_system)


def test_perfect_route_rejects(s4_system, klein_system):
    with pytest.raises(PreconditionError, match="not perfect"):
        perfect_route_check(s4_system)
    with pytest.raises(PreconditionError):
        perfect_route_check(klein_system)


def test_perfect_route_certificate(s4_system, monkeypatch):
    monkeypatch.setattr(maps, "is_perfect", lambda group: True)
    report = perfect_route_check(s4_system)
    assert (report.m, report.n) == (3, 2)
    cert = report.certificate
    assert cert.recipe == "5.4/perfect"
    assert cert.signature == "(0;+;[3];{(2)})"
    assert cert.kernel["applicable"] is False
    assert verify_certificate(cert)


def projective_line_group(q):
    """PSL(2, q) on the points 0, ..., q - 1 and infinity of the projective line."""
    inf = q

    def act(f):
        return Perm.from_images([f(x) + 1 for x in range(q + 1)])

    shift = act(lambda x: inf if x == inf else (x + 1) % q)
    flip = act(lambda x: inf if x == 0 else 0 if x == inf else -pow(x, -1, q) % q)
    return PermGroup([shift, flip])


def perfect_triple(group):
    """First C0, C1, C2 with order(C0 C1) = 2, order(C2 C0) = 2n >= 4 generating the group."""
    invs = [g for g in group.elements() if g.order() == 2]
    a = invs[0]
    for c in invs:
        last = (c * a).order()
        if last % 2 or last < 4:
            continue
        for b in invs:
            if b != a and (a * b).order() == 2 and PermGroup([a, b, c]).order() == group.order():
                return a, b, c
    return None


def test_perfect_route_psl_2_11():
    group = projective_line_group(11)
    assert group.order() == 660
    triple = perfect_triple(group)
    assert triple is not None
    a, b, c = triple
    system = InvolutionSystem.create(triple, [2, (b * c).order(), (c * a).order()])
    assert is_perfect(system.group)
    report = perfect_route_check(system)
    assert (report.m, report.n) == ((b * c).order(), (c * a).order() // 2)
    cert = report.certificate
    assert cert.recipe == "5.4/perfect"
    assert cert.signature == f"(0;+;[{report.m}];{{({report.n})}})"
    assert verify_certificate(cert)


def test_odd_word_certificate(klein_system, s3_system):
    cert = odd_word_certificate(klein_system)
    assert cert.recipe == "5.1/odd-word"
    assert verify_certificate(cert)
    with pytest.raises(PreconditionError):
        odd_word_certificate(s3_system)


def test_string_note(s4_system, klein_system):
    assert string_c_group_note(s4_system).non_commuting == [(0, 2)]
    assert string_c_group_note(klein_system).holds
    assert string_c_group_note(klein_system).to_dict()["intersection_condition"] == "not checked"


def test_records():
    record = {
        "degree": 4,
        "generators": [[2, 1, 4, 3], [2, 1, 3, 4], [1, 3, 2, 4]],
        "roles": ["C0", "C1", "C2"],
        "declared_links": [2, 3, 4],
        "metadata": {"name": "cube"},
    }
    system = group_from_record(record)
    assert isinstance(system, InvolutionSystem)
    assert system.metadata == {"name": "cube"}
    t = [2, 3, 1]
    rot = group_from_record({"degree": 3, "generators": [t, [3, 1, 2], [2, 1, 3]], "roles": ["X1", "X2", "Z"], "declared_links": [3, 3]})
    assert isinstance(rot, RotationSystem) and rot.z is not None


@pytest.mark.parametrize(
    "record",
    [
        {"degree": 0, "generators": [], "roles": [], "declared_links": []},
        {"degree": 3, "generators": [[1, 1, 2]], "roles": ["C0"], "declared_links": [2]},
        {"degree": 3, "generators": [[2, 1, 3], [1, 3, 2]], "roles": ["C1", "C0"], "declared_links": [3, 3]},
        {"degree": 3, "generators": [[2, 3, 1]], "roles": ["X2"], "declared_links": [3]},
    ],
)
def test_bad_records(record):
    with pytest.raises(GroupFileError):
        group_from_record(record)


def test_ingest_group(tmp_path):
    path = tmp_path / "group.json"
    path.write_bytes(
        orjson.dumps(
            {
                "degree": 4,
                "generators": [[2, 1, 4, 3], [3, 4, 1, 2], [4, 3, 2, 1]],
                "roles": ["C0", "C1", "C2"],
                "declared_links": [2, 2, 2],
            }
        )
    )
    assert ingest_group(path).group.order() == 4
    bad = tmp_path / "bad.json"
    bad.write_text("{degree")
    with pytest.raises(GroupFileError):
        ingest_group(bad)


@st.composite
def involutions(draw, degree=6):
    points = draw(st.permutations(range(degree)))
    pairs = draw(st.integers(1, degree // 2))
    images = list(range(degree))
    for t in range(pairs):
        a, b = points[2 * t], points[2 * t + 1]
        images[a], images[b] = b, a
    return Perm(images)


@given(invs=st.lists(involutions(), min_size=2, max_size=4))
def test_odd_identity_matches_parity_oracle(invs, parity_oracle):
    links = tuple((a * b).order() for a, b in zip(invs, invs[1:] + invs[:1]))
    system = InvolutionSystem(PermGroup(invs), tuple(invs), links)
    result = odd_identity_check(system)
    assert result.holds == parity_oracle(invs)
    if result.witness is not None:
        assert len(result.witness) % 2 == 1
