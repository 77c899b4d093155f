"""Pipeline, checkpointing, parallel invariance, CLI surfaces."""

import json
import os

import pytest

from curvesearch.bounds import load_lauter
from curvesearch.cli import main
from curvesearch.search import (
    CheckpointError,
    ConfigError,
    CurveRecord,
    SearchConfig,
    SearchStats,
    read_catalog,
    report,
    run_search,
    verify,
    write_catalog,
)


def test_config_validation():
    with pytest.raises(ConfigError):
        SearchConfig(degree=7, fields=(8,))
    with pytest.raises(ConfigError):
        SearchConfig(degree=4, fields=())
    with pytest.raises(ConfigError):
        SearchConfig(degree=4, fields=(7,))
    with pytest.raises(ConfigError):
        SearchConfig(degree=4, fields=(8, 8))
    cfg = SearchConfig(degree=6, fields=(8, 1024))
    assert cfg.long_run


def test_degree4_f64_finds_the_two_record_quartics():
    stats = SearchStats()
    records = run_search(SearchConfig(degree=4, fields=(64,)), stats=stats)
    hits = [r for r in records if r.counts[64].smooth == 113 and r.genus == (3, 3)]
    assert len(hits) == 2
    for rec in hits:
        assert rec.absolute == "yes"
        assert rec.n_range[64] == (113, 113)
    assert stats.orbits_seen == 279
    assert stats.orbits_seen == stats.orbits_trivial + stats.counted


def test_degree2_default_catalog_is_empty():
    assert run_search(SearchConfig(degree=2, fields=(64,))) == []


def test_emitted_records_are_certified_and_consistent():
    records = run_search(SearchConfig(degree=3, fields=(8, 64)))
    assert records
    for rec in records:
        assert rec.absolute != "reducible"
        assert rec.genus.lo <= rec.genus.hi
        assert set(rec.counts) == {8, 64}
        assert rec.theorem1_ok in (None, True)
        for q, pc in rec.counts.items():
            assert pc.total == pc.smooth + len(pc.singular_points)
            n_lo, n_hi = rec.n_range[q]
            assert pc.smooth <= n_lo <= n_hi


def test_catalog_round_trip(tmp_path):
    out = tmp_path / "catalog.jsonl"
    records = run_search(
        SearchConfig(degree=4, fields=(64,), out_path=str(out))
    )
    assert out.exists()
    loaded = read_catalog(str(out))
    assert [r.to_json() for r in loaded] == [r.to_json() for r in records]
    # canonical order
    masks = [(r.degree, r.mask) for r in loaded]
    assert masks == sorted(masks)


def test_parallel_catalog_identity(tmp_path):
    base = run_search(SearchConfig(degree=4, fields=(8, 64), jobs=1))
    quad = run_search(SearchConfig(degree=4, fields=(8, 64), jobs=4))
    assert [r.to_json() for r in base] == [r.to_json() for r in quad]


def test_checkpoint_resume_identity(tmp_path):
    out_a = tmp_path / "full.jsonl"
    full = run_search(
        SearchConfig(degree=4, fields=(64,), range_bits=12, out_path=str(out_a))
    )

    out_b = tmp_path / "resumed.jsonl"
    ck = tmp_path / "ck.bin"
    cfg = SearchConfig(
        degree=4, fields=(64,), range_bits=12, out_path=str(out_b),
        checkpoint_path=str(ck), stop_after_ranges=3,
    )
    with pytest.raises(InterruptedError):
        run_search(cfg)
    assert ck.exists()
    cfg2 = SearchConfig(
        degree=4, fields=(64,), range_bits=12, out_path=str(out_b),
        checkpoint_path=str(ck),
    )
    resumed = run_search(cfg2)
    assert [r.to_json() for r in resumed] == [r.to_json() for r in full]
    # byte-identical files after canonical sort
    assert out_a.read_bytes() == out_b.read_bytes()


def test_checkpoint_config_mismatch_and_corruption(tmp_path):
    ck = tmp_path / "ck.bin"
    cfg = SearchConfig(
        degree=4, fields=(64,), range_bits=12, checkpoint_path=str(ck),
        stop_after_ranges=1,
    )
    with pytest.raises(InterruptedError):
        run_search(cfg)

    other = SearchConfig(degree=4, fields=(8,), range_bits=12,
                         checkpoint_path=str(ck))
    with pytest.raises(CheckpointError, match="config"):
        run_search(other)

    blob = ck.read_bytes()
    ck.write_bytes(b"XXXXXXXX" + blob[8:])
    with pytest.raises(CheckpointError, match="magic"):
        run_search(SearchConfig(degree=4, fields=(64,), range_bits=12,
                                checkpoint_path=str(ck)))

    ck.write_bytes(blob[:-10])
    with pytest.raises(CheckpointError, match="truncated"):
        run_search(SearchConfig(degree=4, fields=(64,), range_bits=12,
                                checkpoint_path=str(ck)))


def test_verify_reference_examples():
    rec = verify("x^5 + y^5 + z^5", 16)
    assert rec.counts[16].smooth == 65
    assert rec.genus == (6, 6)
    assert rec.absolute == "yes"

    rec = verify("x^2*y^4 + y^6 + x^5*z + x^2*y^3*z + x^3*y*z^2 + x*y^3*z^2"
                 " + y^4*z^2 + x^3*z^3 + x^2*y*z^3 + x*z^5", 512)
    assert rec.counts[512].smooth == 813

    with pytest.raises(ConfigError):
        verify("x^6", 8)  # trivially reducible
    with pytest.raises(ConfigError):
        verify("x^5 + y^5 + z^5", 7)


def test_verify_accepts_mask_ids():
    from curvesearch.polyrep import parse_poly

    f = parse_poly("x^5 + y^5 + z^5")
    rec = verify(f.mask_id, 16)
    assert rec.counts[16].smooth == 65


def test_record_json_round_trip():
    rec = verify("x^3*y^2 + y^5 + x^3*y*z + y^3*z^2 + z^5", 1024)
    line = rec.to_json()
    back = CurveRecord.from_json(line)
    assert back.to_json() == line
    obj = json.loads(line)
    assert obj["counts"]["1024"]["smooth"] == 1343
    assert obj["n_range"]["1024"] == [1345, 1345]
    assert obj["singular"][0]["cone_type"] == "u v"


def test_report_contents():
    records = run_search(SearchConfig(degree=4, fields=(64,)))
    table = load_lauter()
    text = report(records, table, genus_range=(1, 3))
    lines = text.splitlines()
    assert lines[0].lstrip().startswith("q")
    row64 = next(ln for ln in lines if ln.lstrip().startswith("64"))
    assert "113" in row64  # best 3 and bound 3 coincide
    assert "ambiguous genus" in text
    assert "[n, k-2, n-k]" in text  # genus-3 code parameter annotation
    with pytest.raises(ValueError):
        report([], table)


def test_cli_end_to_end(tmp_path, capsys):
    out = tmp_path / "cat.jsonl"
    rc = main([
        "search", "--degree", "4", "--fields", "64", "--out", str(out),
    ])
    assert rc == 0
    assert out.exists()

    rc = main(["report", "--catalog", str(out)])
    assert rc == 0
    captured = capsys.readouterr()
    assert "bound" in captured.out

    rc = main(["verify", "--poly", "x^5 + y^5 + z^5", "--field", "16"])
    assert rc == 0
    captured = capsys.readouterr()
    assert '"smooth": 65' in captured.out

    rc = main(["verify", "--mask", "d5:0x00108001", "--field", "16"])
    assert rc == 0


def test_cli_error_codes(tmp_path):
    assert main(["search", "--degree", "9", "--fields", "64"]) == 2
    assert main(["search", "--degree", "4", "--fields", "banana"]) == 2
    assert main(["verify", "--poly", "x^6", "--field", "8"]) == 2

    ck = tmp_path / "ck.bin"
    ck.write_bytes(b"garbage")
    rc = main([
        "search", "--degree", "4", "--fields", "64",
        "--checkpoint", str(ck),
    ])
    assert rc == 3


def test_write_catalog_atomic(tmp_path):
    out = tmp_path / "cat.jsonl"
    records = run_search(SearchConfig(degree=3, fields=(8,)))
    write_catalog(str(out), records)
    assert not os.path.exists(str(out) + ".tmp")
    assert read_catalog(str(out)) == read_catalog(str(out))
