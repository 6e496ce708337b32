import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dupsparse import io
from dupsparse.comm import AdversarialOverlap, UniformIID, distribute
from dupsparse.graph import Graph, Partition, gen_weighted_random
from dupsparse.spanner import t_bundle
from helpers import complete


def test_format_edgelist():
    g = Graph(4, {(2, 1): 3.0, (0, 3): 0.5})
    assert io.format_edgelist(g) == "4 2\n0 3 0.5\n1 2 3\n"


def test_read_skips_comments_and_defaults_weight():
    g = io.read_edgelist("# a comment\n3 2\n\n0 1\n1 2 2.5\n")
    assert g.weights() == {(0, 1): 1.0, (1, 2): 2.5}


def test_count_mismatch():
    with pytest.raises(ValueError):
        io.read_edgelist("3 2\n0 1 1\n")
    with pytest.raises(ValueError):
        io.read_edgelist("")


@given(st.integers(2, 15), st.integers(0, 10 ** 6), st.integers(1, 9))
def test_edgelist_roundtrip(n, seed, w_max):
    g = gen_weighted_random(n, min(n, n * (n - 1) // 2), w_max, seed)
    assert io.read_edgelist(io.format_edgelist(g)) == g


def test_path_roundtrip(tmp_path):
    g = Graph(3, {(0, 1): 1 / 3, (1, 2): 7.0})
    io.write_edgelist(g, tmp_path / "g.el")
    assert io.read_edgelist(tmp_path / "g.el") == g
    assert not io.is_distributed(tmp_path / "g.el")


@pytest.mark.parametrize("policy,s", [(UniformIID(0.6), 3), (AdversarialOverlap(2), 4)])
def test_distributed_roundtrip(policy, s):
    dg = distribute(complete(6), s, policy, 2)
    text = io.format_distributed(dg)
    assert io.is_distributed(text) and text.startswith(f"6 15 s={s} dup=1")
    back = io.read_distributed(text)
    assert back.base == dg.base and back.s == s and back.duplication
    assert back.sites_of() == dg.sites_of()
    assert back.residence_prob == dg.residence_prob


def test_partition_roundtrip(tmp_path):
    p = Partition([0, 1, 1, 0, 2])
    io.write_partition(p, tmp_path / "p.txt")
    assert io.read_partition(tmp_path / "p.txt") == p
    with pytest.raises(ValueError):
        io.read_partition("0 0\n2 1\n")


def test_bundle_files(tmp_path):
    dg = distribute(complete(6), 2, UniformIID(1.0), 0)
    bundle, _ = t_bundle(dg, 3, 2, "bb")
    manifest = io.write_bundle(bundle, tmp_path / "b")
    data = json.loads(manifest.read_text())
    assert data == {"t": 3, "levels": ["b.level1.el", "b.level2.el", "b.level3.el"]}
    assert io.read_bundle_levels(manifest) == bundle.levels


def test_rprime(tmp_path):
    io.write_rprime({(1, 2): 0.5, (0, 1): 1.0}, tmp_path / "r.txt")
    assert (tmp_path / "r.txt").read_text() == "0 1 1.0\n1 2 0.5\n"
