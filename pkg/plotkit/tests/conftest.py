import pytest


def write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")
    return str(path)


@pytest.fixture
def heatmap_csv(tmp_path):
    rows = [(t, x, (1.0 + t) * (2.0 - abs(x)))
            for t in (0.0, 0.1, 0.2) for x in (-1.0, 0.0, 1.0)]
    return write_csv(tmp_path / "psi2_heatmap.csv", "t,x,psi2", rows)


@pytest.fixture
def current_csv(tmp_path):
    rows = [(0.01 * k, x, 0.3 * x * (1 - 0.01 * k))
            for k in range(50) for x in (0.5, 1.5)]
    return write_csv(tmp_path / "current.csv", "t,probe_x,J_R", rows)


@pytest.fixture
def norm_csv(tmp_path):
    rows = [(0.05 * k, 2.718 ** (-0.1 * k)) for k in range(40)]
    return write_csv(tmp_path / "norm.csv", "t,norm2", rows)


@pytest.fixture
def trace_csv(tmp_path):
    rows = [(0.05 * k, 1.0, 0.0, 1.0 / (1.0 + 0.05 * k)) for k in range(40)]
    return write_csv(tmp_path / "trace_purity.csv", "t,trace_re,trace_im,purity", rows)
