import pytest

HEADER = "n,trials,alpha,c,t,a,b,mean_fdp,std_err,ci_low,ci_high,p_hit_end,z_hat,mean_K,seed"


def _row(n, mean, se, *, alpha="1/20", c="1/2", t="19/20", a=1, b=20, seed=7):
    lo, hi = mean - 2.576 * se, mean + 2.576 * se
    return (
        f"{n},100000,{alpha},{c},{t},{a},{b},{mean!r},{se!r},{lo!r},{hi!r},"
        f"0.01,0.99,{n * 0.9!r},{seed}"
    )


@pytest.fixture
def make_csv(tmp_path):
    """Write a schema-conforming sweep CSV with the given (n, mean, se) rows."""

    def _make(rows, name="sweep.csv", **kw):
        path = tmp_path / name
        lines = [HEADER] + [_row(n, mean, se, **kw) for (n, mean, se) in rows]
        path.write_text("\n".join(lines) + "\n")
        return path

    return _make
