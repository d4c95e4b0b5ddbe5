import numpy as np
import pytest

from quadstack.config import ServoSpec
from quadstack.hal import (
    AngleRangeError,
    Buzzer,
    CameraTrigger,
    EventTrace,
    HalProtocolError,
    PwmRegisters,
    ServoBank,
    angle_to_pulse,
    compute_prescale,
    pulse_to_angle,
    pulse_to_off_count,
    range_from_echo,
    set_channel_pulse,
)

SERVO = ServoSpec(
    nominal_torque_ncm=18.0,
    angular_range_deg=180.0,
    pulse_min_us=500.0,
    pulse_max_us=2500.0,
    current_draw_ma=200.0,
)


def test_angle_to_pulse_endpoints_and_midpoint():
    assert angle_to_pulse(SERVO, 0.0) == 500.0
    assert angle_to_pulse(SERVO, 90.0) == 1500.0
    assert angle_to_pulse(SERVO, 45.0) == 1000.0
    assert angle_to_pulse(SERVO, 180.0) == 2500.0


def test_angle_to_pulse_monotone():
    angles = np.linspace(0, 180, 181)
    pulses = [angle_to_pulse(SERVO, a) for a in angles]
    assert all(b > a for a, b in zip(pulses, pulses[1:]))


def test_angle_out_of_range():
    with pytest.raises(AngleRangeError):
        angle_to_pulse(SERVO, -1.0)
    with pytest.raises(AngleRangeError):
        angle_to_pulse(SERVO, 181.0)


@pytest.mark.parametrize("rate,expected", [(50, 121), (200, 30), (60, 101)])
def test_prescale_datasheet_formula(rate, expected):
    # round(25e6 / (4096 * rate)) - 1
    assert compute_prescale(rate) == expected


def test_prescale_band_errors():
    with pytest.raises(ValueError):
        compute_prescale(10.0)  # prescale would exceed 255
    with pytest.raises(ValueError):
        compute_prescale(5000.0)  # below 3


def test_prescale_non_increasing_in_rate():
    rates = np.linspace(25, 1500, 300)
    values = [compute_prescale(r) for r in rates]
    assert all(b <= a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize(
    "pulse,rate,expected",
    [(1500.0, 50.0, 307), (0.0, 50.0, 0), (2500.0, 50.0, 512)],
)
def test_off_counts(pulse, rate, expected):
    assert pulse_to_off_count(pulse, rate) == expected


def test_pulse_exceeding_period_rejected():
    with pytest.raises(ValueError):
        pulse_to_off_count(2500.0, 500.0)  # period is 2000 us


def test_set_channel_pulse_transaction_bytes():
    regs = PwmRegisters()
    lines = set_channel_pulse(regs, 3, 1500.0, 50.0)
    # channel 3 block starts at 0x06 + 12 = 0x12; OFF count 307 = 0x133
    assert lines == ["W 40 12 00 00 33 01"]
    assert regs.channel_counts(3) == (0, 307)


def test_set_channel_pulse_isolation():
    regs = PwmRegisters()
    set_channel_pulse(regs, 5, 1200.0, 50.0)
    before = {k: regs.channel_block(k) for k in range(16) if k != 7}
    mode1 = regs.mode1
    set_channel_pulse(regs, 7, 1800.0, 50.0)
    for k, block in before.items():
        assert regs.channel_block(k) == block
    assert regs.mode1 == mode1


def test_channel_validation():
    regs = PwmRegisters()
    with pytest.raises(ValueError):
        set_channel_pulse(regs, 16, 1000.0, 50.0)


def test_prescale_write_requires_sleep():
    regs = PwmRegisters()
    regs.configure_rate(50.0)  # ends awake
    assert not regs.sleeping
    snapshot = bytes(regs.regs)
    with pytest.raises(HalProtocolError):
        regs.write(0xFE, [30])
    assert bytes(regs.regs) == snapshot  # nothing changed
    regs.write(0x00, [regs.mode1 | 0x10])  # sleep again
    regs.write(0xFE, [30])
    assert regs.prescale == 30


def test_count_high_nibble_masked():
    regs = PwmRegisters()
    regs.write(0x06, [0xFF, 0xFF, 0xFF, 0xFF])
    on, off = regs.channel_counts(0)
    assert on == 0x0FFF and off == 0x0FFF


def test_angle_round_trip_within_quantization():
    rng = np.random.default_rng(59)
    regs = PwmRegisters()
    for _ in range(10_000):
        rate = rng.uniform(25.0, 400.0)
        angle = rng.uniform(0.0, SERVO.angular_range_deg)
        period = 1e6 / rate
        pulse = angle_to_pulse(SERVO, angle)
        channel = int(rng.integers(0, 16))
        set_channel_pulse(regs, channel, pulse, rate)
        decoded = pulse_to_angle(SERVO, regs.channel_pulse_us(channel, rate))
        bound = 0.5 * (period / 4096) / (SERVO.pulse_max_us - SERVO.pulse_min_us) * SERVO.angular_range_deg
        assert abs(decoded - angle) <= bound + 1e-9


def test_range_from_echo_examples():
    assert range_from_echo(0.0).distance_m == 0.0
    reading = range_from_echo(0.005831)
    assert reading.distance_m == pytest.approx(1.000, abs=0.001)
    assert range_from_echo(0.030).is_timeout  # implies 5.1 m, beyond 4 m


def test_range_rejects_negative_duration():
    with pytest.raises(ValueError):
        range_from_echo(-0.001)


def test_event_devices_share_trace():
    trace = EventTrace()
    CameraTrigger(trace).shoot(1.5)
    Buzzer(trace).beep(2.0)
    assert trace.events == [(1.5, "camera_trigger"), (2.0, "beep")]
    assert trace.since(1.9) == ["beep"]


def test_servo_bank_readback_close_to_command():
    bank = ServoBank(SERVO, joints_per_leg=2, update_rate_hz=50.0)
    bank.command_angle(2, 1, -37.5)
    decoded = bank.readback_angle(2, 1)
    assert decoded == pytest.approx(-37.5, abs=0.25)


def test_servo_bank_configures_rate():
    bank = ServoBank(SERVO, joints_per_leg=3, update_rate_hz=50.0)
    assert bank.registers.prescale == 121
    assert not bank.registers.sleeping
