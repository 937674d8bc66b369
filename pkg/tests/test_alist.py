import pytest

from kitecodes import alist
from kitecodes.construction import CodeSpec, build_mother_code
from kitecodes.profile import formula_profile


@pytest.mark.parametrize("n", [57, 60, 200, 57 * 20])
@pytest.mark.parametrize("variant", ["improved", "original"])
def test_round_trip(n, variant):
    H = build_mother_code(CodeSpec(57, variant, 4), formula_profile(57)).prefix(n)
    text = alist.dumps(H)
    back = alist.loads(text, variant)
    assert back.same_as(H)
    assert alist.dumps(back) == text


def test_file_round_trip(tmp_path, code189):
    path = tmp_path / "h.alist"
    alist.write(code189, path)
    assert alist.read(path).same_as(code189)
    first = path.read_text().split("\n")[0]
    assert first == f"{code189.n} {code189.r}"


def test_header_of_k1890(code1890):
    assert alist.dumps(code1890).split("\n", 1)[0] == "37800 35910"


def test_rejects_inconsistent_column_section(code189):
    lines = alist.dumps(code189.prefix(300)).split("\n")
    # move one row index in the column section so it disagrees with the rows
    col = lines[4].split()
    col[0] = str(int(col[0]) % 111 + 1)
    lines[4] = " ".join(col)
    with pytest.raises(ValueError):
        alist.loads("\n".join(lines))
