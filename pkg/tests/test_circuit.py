import pytest

from hexqec.circuit import (
    Circuit,
    CircuitBuilder,
    CircuitError,
    CircuitParseError,
    DetectorDef,
    Instruction,
    Layer,
    append_layer,
    parse,
    serialize,
)


def test_append_layer_counts_measurements():
    c = Circuit(8)
    c = append_layer(c, [Instruction("RX", tuple(range(7)))])
    assert c.num_measurements == 0
    c = append_layer(c, [Instruction("MZ", (3,))])
    assert c.num_measurements == 1
    assert c.measurements == ((1, 3, "Z"),)


def test_layer_rejects_qubit_collision():
    with pytest.raises(CircuitError):
        Layer((Instruction("CNOT", (0, 1)), Instruction("MX", (1,))))


def test_noise_overlap_is_allowed():
    Layer(
        (
            Instruction("CNOT", (0, 1)),
            Instruction("DEP2", (0, 1), 0.001),
            Instruction("DEP1", (2,), 0.001),
        )
    )


def test_two_qubit_gate_needs_pairs():
    with pytest.raises(CircuitError):
        Instruction("CXSWAP", (0, 1, 2))
    with pytest.raises(CircuitError):
        Instruction("SWAP", (3, 3))


def test_out_of_range_qubit_rejected():
    with pytest.raises(CircuitError):
        append_layer(Circuit(2), [Instruction("RZ", (5,))])


def test_serialize_single_layer():
    c = append_layer(Circuit(2), [Instruction("RZ", (0, 1))])
    assert serialize(c) == "QUBITS 2\nRZ 0 1\nTICK\n"


def test_parse_single_cxswap_layer():
    c = parse("CXSWAP 0 1\nTICK\n")
    assert len(c.layers) == 1
    assert c.layers[0].instructions == (Instruction("CXSWAP", (0, 1)),)
    assert c.num_qubits == 2


def test_detector_line_on_last_measurement():
    b = CircuitBuilder(3)
    b.layer([Instruction("RZ", (0, 1, 2))])
    b.layer([Instruction("MZ", (0, 1, 2))])
    b.detector([2], (0, 1, 0, 2))
    text = serialize(b.build())
    assert "DETECTOR(0,1,0,2) rec[-1]" in text


def test_dangling_record_reference():
    text = "QUBITS 4\nMZ 0 1 2\nDETECTOR(0,0,0,0) rec[-5]\nTICK\n"
    with pytest.raises(CircuitParseError) as err:
        parse(text)
    assert "dangling" in str(err.value)


def test_round_trip_is_identity():
    b = CircuitBuilder(6)
    b.layer([Instruction("RX", (0, 2)), Instruction("RZ", (1, 3, 4, 5))])
    b.layer([Instruction("CNOT", (0, 1, 2, 3)), Instruction("IDLE", (4, 5))])
    b.layer([Instruction("CXSWAP", (1, 0)), Instruction("SWAP", (2, 4))])
    b.layer([Instruction("MX", (0, 2)), Instruction("MZ", (1, 3, 4, 5))])
    b.detector([0], (0, 0, 0, 0))
    b.detector([2, 3], (1.5, 2, 0, 1))
    b.observable(0, [3, 4])
    circ = b.build()

    text = serialize(circ)
    assert parse(text) == circ
    assert serialize(parse(text)) == text


def test_round_trip_noisy_lines():
    b = CircuitBuilder(2)
    b.layer([Instruction("RZ", (0, 1)), Instruction("XERR", (0, 1), 0.001)])
    b.layer([Instruction("CNOT", (0, 1)), Instruction("DEP2", (0, 1), 0.001)])
    b.layer([Instruction("XERR", (0,), 0.25), Instruction("MZ", (0, 1))])
    circ = b.build()
    text = serialize(circ)
    assert "DEP2(0.001) 0 1" in text
    assert parse(text) == circ
    assert serialize(parse(text)) == text


def test_detector_basis_derived_at_parse():
    text = "QUBITS 2\nMX 0\nMZ 1\nDETECTOR(0,0,0,0) rec[-2]\nDETECTOR(0,0,0,1) rec[-1]\nTICK\n"
    c = parse(text)
    assert c.detectors[0].basis == "X"
    assert c.detectors[1].basis == "Z"


def test_comments_and_blank_lines_ignored():
    text = "# header\nQUBITS 2\n\nRZ 0 1  # prep\nTICK\n"
    c = parse(text)
    assert c.layers[0].instructions == (Instruction("RZ", (0, 1)),)


def test_unknown_statement_reports_line():
    with pytest.raises(CircuitParseError) as err:
        parse("QUBITS 1\nFROB 0\nTICK\n")
    assert err.value.line == 2


def test_measurement_order_is_layer_then_instruction_then_target():
    b = CircuitBuilder(4)
    b.layer([Instruction("MX", (2, 0)), Instruction("MZ", (1,))])
    b.layer([Instruction("MZ", (3,))])
    circ = b.build()
    assert [m[1] for m in circ.measurements] == [2, 0, 1, 3]
    assert [m[2] for m in circ.measurements] == ["X", "X", "Z", "Z"]
