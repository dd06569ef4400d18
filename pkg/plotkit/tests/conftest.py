import pytest

from omit_ring import cli as sim_cli


def _sim(*argv):
    assert sim_cli.run(list(argv)) == 0


@pytest.fixture(scope="session")
def csv_dir(tmp_path_factory):
    """Preset CSVs rendered once for the whole session."""
    d = tmp_path_factory.mktemp("csv")
    _sim("sweep", "--preset", "fig2", "--points", "201",
         "--set", "cooperativity=0", "-o", str(d / "fig2_c0.csv"))
    _sim("sweep", "--preset", "fig2", "--points", "201",
         "-o", str(d / "fig2_c05.csv"))
    _sim("sweep", "--preset", "fig3a", "--points", "201",
         "-o", str(d / "fig3_cw.csv"))
    _sim("sweep", "--preset", "fig3b", "--points", "201",
         "-o", str(d / "fig3_ccw.csv"))
    _sim("ef-scan", "--from", "0", "--to", "120e3", "--points", "7",
         "-o", str(d / "ef_cw.csv"))
    _sim("ef-scan", "--from=-120e3", "--to", "0", "--points", "7",
         "-o", str(d / "ef_ccw.csv"))
    _sim("delay-scan", "--from", "0", "--to", "120e3", "--points", "5",
         "-o", str(d / "tau_c05.csv"))
    _sim("delay-scan", "--from", "0", "--to", "120e3", "--points", "5",
         "--set", "cooperativity=0", "-o", str(d / "tau_c0.csv"))
    return d
