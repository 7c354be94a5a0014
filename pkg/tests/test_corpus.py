import os

from evdd import corpus, qasm

from conftest import CIRCUITS_DIR, EQPAIRS_DIR


def test_bundled_files_match_generators(tmp_path):
    # The checked-in corpus must be exactly what the generators emit.
    gen_dir = tmp_path / "circuits"
    corpus.write_corpus(str(gen_dir))
    committed = sorted(os.listdir(CIRCUITS_DIR))
    generated = sorted(os.listdir(gen_dir))
    assert committed == generated
    for name in committed:
        with open(os.path.join(CIRCUITS_DIR, name)) as fh:
            want = fh.read()
        with open(gen_dir / name) as fh:
            assert fh.read() == want, name


def test_bundled_eqpairs_match_generators(tmp_path):
    gen_dir = tmp_path / "eqpairs"
    corpus.write_eq_pairs(str(gen_dir))
    committed = sorted(os.listdir(EQPAIRS_DIR))
    assert committed == sorted(os.listdir(gen_dir))
    for name in committed:
        with open(os.path.join(EQPAIRS_DIR, name)) as fh:
            want = fh.read()
        with open(gen_dir / name) as fh:
            assert fh.read() == want, name


def test_corpus_coverage():
    circuits = corpus.standard_corpus()
    assert len(circuits) >= 30
    sizes = {c.n for c in circuits}
    assert sizes == set(range(2, 11))
    families = {c.source_name.rsplit("_", 1)[0] for c in circuits}
    assert {"ghz", "wstate", "qft", "dj", "graphstate", "qaoa",
            "clifford", "dense"} <= families


def test_every_file_parses(circuits_dir, eqpairs_dir):
    for d in (circuits_dir, eqpairs_dir):
        for name in os.listdir(d):
            c = qasm.parse_file(os.path.join(d, name))
            assert 2 <= c.n <= 10
            assert all(q < c.n for g in c.ops for q in g.qubits)
