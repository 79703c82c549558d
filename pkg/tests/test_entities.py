import pytest

from gridcon.entities import EntityId, Kind, parse_token, tokens
from gridcon.errors import EntityError


@pytest.mark.parametrize(
    "token,kind",
    [
        ("P12", Kind.BUS), ("PL7_8", Kind.TRANSMISSION_LINE), ("PBATT3", Kind.BATTERY),
        ("C1_1_6_6", Kind.SUBSTATION), ("C2_1_46_0", Kind.SONET), ("C3_2_1_2", Kind.DWDM),
        ("L1_6", Kind.POWER_SUPPLY_LINE), ("U9", Kind.PMU), ("R3", Kind.RTU),
    ],
)
def test_token_round_trip(token, kind):
    e = parse_token(token)
    assert e.kind is kind
    assert str(e) == token


def test_line_normalized():
    assert parse_token("PL8_7") == parse_token("PL7_8")
    assert str(EntityId.line(9, 4)) == "PL4_9"


@pytest.mark.parametrize("bad", ["PL3_3", "C1_8_1_1", "C2_3_1_1", "L7_1", "X1", "P-1", ""])
def test_invalid_tokens(bad):
    with pytest.raises(EntityError):
        parse_token(bad)


def test_canonical_order():
    ents = [parse_token(t) for t in ("C1_1_2_2", "P10", "P2", "PL1_2")]
    assert tokens(ents) == ["P2", "P10", "PL1_2", "C1_1_2_2"]


def test_layers_and_roles():
    assert parse_token("P3").is_bus and parse_token("P3").is_node
    assert parse_token("PL1_2").is_link and not parse_token("PL1_2").is_node
    assert parse_token("C1_2_4_4").is_comm_node
    assert parse_token("C1_6_4_4").is_link
    assert parse_token("L1_3").layer == "CP"
