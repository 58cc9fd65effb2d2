import os

from hardcore.cli import main
from hardcore.gadgets import cycle_graph, path_graph, write_graph


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr().out
    return code, out


def test_fixed_points_report(capsys):
    code, out = run_cli(capsys, "fixed-points", "--d", "6", "--lambda", "1")
    assert code == 0
    assert "lambda_c: 3125/4096" in out
    assert "0.423" in out
    assert "q_minus: 0.0599" in out
    assert out.startswith("# hardcore fixed-points")
    assert "# config:" in out


def test_fixed_points_lambda_c_d3(capsys):
    code, out = run_cli(capsys, "fixed-points", "--d", "3", "--lambda", "2")
    assert code == 0
    assert "lambda_c: 4 =" in out
    assert "uniqueness" in out


def test_fixed_points_byte_identical(capsys, tmp_path):
    # identical configuration (including the out path embedded in the
    # header) gives byte-identical output
    da, db = tmp_path / "a", tmp_path / "b"
    da.mkdir()
    db.mkdir()
    cwd = os.getcwd()
    try:
        os.chdir(da)
        assert main(["fixed-points", "--d", "6", "--lambda", "1",
                     "--out", "fp.txt"]) == 0
        os.chdir(db)
        assert main(["fixed-points", "--d", "6", "--lambda", "1",
                     "--out", "fp.txt"]) == 0
    finally:
        os.chdir(cwd)
    capsys.readouterr()
    assert (da / "fp.txt").read_bytes() == (db / "fp.txt").read_bytes()


def test_fixed_points_domain_error_exit_code(capsys):
    code, out = run_cli(capsys, "fixed-points", "--d", "2", "--lambda", "1")
    assert code == 1
    assert out.startswith("error: domain:")


def test_z_exact_four_cycle(capsys, tmp_path):
    f = tmp_path / "c4.hgg"
    write_graph(cycle_graph(4), f)
    code, out = run_cli(capsys, "z", "exact", "--in", str(f), "--lambda", "1")
    assert code == 0
    assert "Z: 7 =" in out


def test_z_exact_resource_exit_code(capsys, tmp_path):
    f = tmp_path / "p50.hgg"
    write_graph(path_graph(50), f)
    code, out = run_cli(capsys, "z", "exact", "--in", str(f), "--size-cap", "40")
    assert code == 2
    assert out.startswith("error: resource:")


def test_z_conditional(capsys, tmp_path):
    f = tmp_path / "p3.hgg"
    write_graph(path_graph(3), f)
    eta = tmp_path / "eta.txt"
    eta.write_text("0 1\n2 1\n")
    code, out = run_cli(capsys, "z", "conditional", "--in", str(f),
                        "--eta", str(eta))
    assert code == 0
    assert "Z_eta: 1 =" in out


def test_z_formulas_with_check(capsys):
    code, out = run_cli(capsys, "z", "formulas", "--n", "4", "--d", "3",
                        "--alpha", "1/4", "--beta", "1/4", "--eta-plus", "1",
                        "--check", "--mc-samples", "4000", "--seed", "7")
    assert code == 0
    assert "E_Z:" in out and "E_Z2:" in out
    for line in out.splitlines():
        if line.startswith("mc["):
            z = float(line.rsplit("z=", 1)[1])
            assert z < 4.0


def test_moments_eval_and_grid(capsys, tmp_path):
    code, out = run_cli(capsys, "moments", "eval", "--d", "6", "--lambda", "1",
                        "--func", "phi1", "--point", "0.0355,0.4083")
    assert code == 0
    assert "phi1: 0.715" in out
    csv_path = tmp_path / "grid.csv"
    code, out = run_cli(capsys, "moments", "grid", "--func", "h1",
                        "--gn", "6", "--dn", "6", "--out", str(csv_path))
    assert code == 0
    body = csv_path.read_text()
    assert body.startswith("# hardcore moments")
    assert "gamma,delta,h1" in body
    assert (tmp_path / "grid.png").exists()


def test_moments_eval_domain_error(capsys):
    code, out = run_cli(capsys, "moments", "eval", "--d", "6", "--lambda", "1",
                        "--func", "phi1", "--point", "0.7,0.7")
    assert code == 1 and "error: domain" in out


def test_certify_default_grid(capsys, tmp_path):
    out_path = tmp_path / "cert.txt"
    code, out = run_cli(capsys, "certify", "--d", "6", "--lambda", "1",
                        "--out", str(out_path), "--no-plot")
    assert code == 0
    assert "overall: PASS" in out
    assert "verdict: PASS" in out_path.read_text()


def test_gadget_pipeline(capsys, tmp_path):
    g_path = tmp_path / "g.hgg"
    code, out = run_cli(capsys, "gadget", "sample", "--d", "3", "--n", "8",
                        "--seed", "5", "--out", str(g_path))
    assert code == 0 and g_path.exists()
    t_path = tmp_path / "gt.hgg"
    code, out = run_cli(capsys, "gadget", "append-trees", "--d", "3", "--n", "8",
                        "--seed", "5", "--in", str(g_path), "--out", str(t_path))
    assert code == 0
    h_path = tmp_path / "h.hgg"
    write_graph(path_graph(2), h_path)
    hg_path = tmp_path / "hg.hgg"
    code, out = run_cli(capsys, "gadget", "build-hg", "--h", str(h_path),
                        "--gadget", str(t_path), "--k", "1", "--out", str(hg_path))
    assert code == 0
    assert "2 cross edges" in out
    cyc_csv = tmp_path / "cycles.csv"
    code, out = run_cli(capsys, "gadget", "cycles", "--in", str(t_path),
                        "--imax", "6", "--out", str(cyc_csv))
    assert code == 0
    assert cyc_csv.exists() and (tmp_path / "cycles.png").exists()


def test_sample_glauber_csv_and_plot(capsys, tmp_path):
    g_path = tmp_path / "g.hgg"
    write_graph(cycle_graph(6), g_path)
    csv_path = tmp_path / "traj.csv"
    code, out = run_cli(capsys, "sample", "glauber", "--in", str(g_path),
                        "--sweeps", "40", "--seed", "1", "--out", str(csv_path))
    assert code == 0
    lines = [l for l in csv_path.read_text().splitlines() if not l.startswith("#")]
    assert lines[0] == "sweep,w_plus,w_minus,phase"
    assert len(lines) == 41
    assert (tmp_path / "traj.png").exists()


def test_sample_glauber_deterministic(capsys, tmp_path):
    g_path = tmp_path / "g.hgg"
    write_graph(cycle_graph(6), g_path)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert main(["sample", "glauber", "--in", str(g_path), "--sweeps", "30",
                     "--seed", "9", "--out", str(p), "--no-plot"]) == 0
    capsys.readouterr()
    strip = lambda raw: b"\n".join(l for l in raw.splitlines()
                                   if not l.startswith(b"#"))
    assert strip(a.read_bytes()) == strip(b.read_bytes())


def test_reconstruct_csv(capsys, tmp_path):
    csv_path = tmp_path / "recon.csv"
    code, out = run_cli(capsys, "reconstruct", "--d", "6", "--lambda", "1",
                        "--levels", "2..4", "--samples", "4000", "--seed", "2",
                        "--out", str(csv_path))
    assert code == 0
    header = [l for l in csv_path.read_text().splitlines()
              if l.startswith("level")][0]
    assert header.split(",")[:3] == ["level", "x_mean", "x_se"]
    assert (tmp_path / "recon.png").exists()


def test_reduce_single_edge(capsys, tmp_path):
    h_path = tmp_path / "h.hgg"
    write_graph(path_graph(2), h_path)
    code, out = run_cli(capsys, "reduce", "--h", str(h_path), "--d", "3",
                        "--n", "6", "--lambda", "8", "--k", "1", "--seed", "11")
    assert code == 0
    assert "argmax_subset_of_maxcut: True" in out


def test_threads_env_default(monkeypatch):
    monkeypatch.setenv("HARDCORE_THREADS", "3")
    from hardcore.cli import _default_threads
    assert _default_threads() == 3
