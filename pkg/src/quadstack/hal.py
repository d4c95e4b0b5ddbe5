"""Device-facing interfaces and the register-level 16-channel PWM emulator.

The servo path is exercised end to end at the byte level: commanded angles
become pulse widths, pulse widths become 12-bit ON/OFF counts, and counts are
written into an emulated register file through I2C-style transactions.  Each
transaction is logged as one line::

    W <addr7> <reg> <byte> [<byte> ...]

with every field two lowercase hex digits (e.g. ``W 40 06 00 00 33 01``).

The range sensor and IMU are exposed as calibrated SI-unit interfaces; the
camera and buzzer are event-only devices that append timestamped entries to
a shared trace.  Device instances are owned by a single control loop;
concurrent access to one instance is not supported.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from quadstack.config import ServoSpec

OSCILLATOR_HZ = 25_000_000
COUNTS_PER_PERIOD = 4096
SPEED_OF_SOUND_MS = 343.0
MAX_RANGE_M = 4.0

MODE1_ADDR = 0x00
PRESCALE_ADDR = 0xFE
CHANNEL_BASE_ADDR = 0x06
CHANNEL_COUNT = 16
SLEEP_BIT = 0x10


class HalProtocolError(RuntimeError):
    """Register write that the device would reject."""


class AngleRangeError(ValueError):
    """Commanded servo angle outside the spec's angular range."""


def angle_to_pulse(spec: ServoSpec, angle_deg: float) -> float:
    """Linear map from [0, angular_range] degrees to [pulse_min, pulse_max] us."""
    if not -1e-9 <= angle_deg <= spec.angular_range_deg + 1e-9:
        raise AngleRangeError(
            f"angle {angle_deg:.3f} deg outside [0, {spec.angular_range_deg:.1f}]"
        )
    frac = angle_deg / spec.angular_range_deg
    return spec.pulse_min_us + frac * (spec.pulse_max_us - spec.pulse_min_us)


def pulse_to_angle(spec: ServoSpec, pulse_us: float) -> float:
    """Inverse of :func:`angle_to_pulse` (no range check; decodes registers)."""
    frac = (pulse_us - spec.pulse_min_us) / (spec.pulse_max_us - spec.pulse_min_us)
    return frac * spec.angular_range_deg


def compute_prescale(update_rate_hz: float) -> int:
    """Clock divider byte for the requested refresh rate.

    round(25 MHz / (4096 * rate)) - 1, valid while the result stays in the
    device's 3..255 prescale band.
    """
    if update_rate_hz <= 0:
        raise ValueError("update rate must be > 0 Hz")
    prescale = round(OSCILLATOR_HZ / (COUNTS_PER_PERIOD * update_rate_hz)) - 1
    if not 3 <= prescale <= 255:
        raise ValueError(
            f"rate {update_rate_hz} Hz needs prescale {prescale}, outside [3, 255]"
        )
    return prescale


def pulse_to_off_count(pulse_us: float, update_rate_hz: float) -> int:
    """12-bit OFF count for a pulse width at a refresh rate (ON count is 0)."""
    period_us = 1e6 / update_rate_hz
    if pulse_us < 0 or pulse_us > period_us:
        raise ValueError(f"pulse {pulse_us} us outside [0, period {period_us:.1f} us]")
    count = round(pulse_us / period_us * COUNTS_PER_PERIOD)
    return min(count, COUNTS_PER_PERIOD - 1)


class PwmRegisters:
    """Byte-level state of the 16-channel PWM driver.

    MODE1 lives at 0x00, PRESCALE at 0xFE, and each channel owns a 4-byte
    little-endian block (ON_L, ON_H, OFF_L, OFF_H) from 0x06.  PRESCALE is
    writable only while the MODE1 sleep bit (bit 4) is set; count bytes mask
    their high nibble to 12 bits.
    """

    def __init__(self, i2c_address: int = 0x40):
        self.i2c_address = i2c_address
        self.regs = bytearray(256)
        self.regs[MODE1_ADDR] = SLEEP_BIT  # device powers up asleep
        self.transactions: list[str] = []

    @property
    def mode1(self) -> int:
        return self.regs[MODE1_ADDR]

    @property
    def sleeping(self) -> bool:
        return bool(self.regs[MODE1_ADDR] & SLEEP_BIT)

    @property
    def prescale(self) -> int:
        return self.regs[PRESCALE_ADDR]

    def write(self, reg: int, payload: bytes | list[int]) -> str:
        """One I2C write transaction: register address then payload bytes.

        Multi-byte payloads auto-increment the register address.  A PRESCALE
        write with the sleep bit clear raises and leaves every register
        unchanged.
        """
        data = bytes(payload)
        if not data:
            raise ValueError("empty write")
        if not 0 <= reg <= 0xFF or reg + len(data) > 0x100:
            raise ValueError("register window outside the 256-byte map")

        touches_prescale = reg <= PRESCALE_ADDR < reg + len(data)
        if touches_prescale and not self.sleeping:
            raise HalProtocolError("PRESCALE is writable only while the sleep bit is set")

        for i, byte in enumerate(data):
            addr = reg + i
            if CHANNEL_BASE_ADDR <= addr < CHANNEL_BASE_ADDR + 4 * CHANNEL_COUNT:
                offset = (addr - CHANNEL_BASE_ADDR) % 4
                if offset in (1, 3):  # ON_H / OFF_H carry only 4 count bits
                    byte &= 0x0F
            self.regs[addr] = byte

        line = f"W {self.i2c_address:02x} {reg:02x} " + " ".join(f"{b:02x}" for b in data)
        self.transactions.append(line)
        return line

    def channel_block(self, channel: int) -> bytes:
        if not 0 <= channel < CHANNEL_COUNT:
            raise ValueError(f"channel {channel} outside 0..15")
        base = CHANNEL_BASE_ADDR + 4 * channel
        return bytes(self.regs[base : base + 4])

    def channel_counts(self, channel: int) -> tuple[int, int]:
        """(ON, OFF) 12-bit counts currently programmed for a channel."""
        on_l, on_h, off_l, off_h = self.channel_block(channel)
        return on_l | (on_h << 8), off_l | (off_h << 8)

    def channel_pulse_us(self, channel: int, update_rate_hz: float) -> float:
        """Decode the programmed pulse width back to microseconds."""
        on, off = self.channel_counts(channel)
        period_us = 1e6 / update_rate_hz
        return (off - on) % COUNTS_PER_PERIOD / COUNTS_PER_PERIOD * period_us

    def configure_rate(self, update_rate_hz: float) -> list[str]:
        """Sleep, program the prescale for a refresh rate, and wake."""
        mode = self.mode1
        lines = [
            self.write(MODE1_ADDR, [mode | SLEEP_BIT]),
            self.write(PRESCALE_ADDR, [compute_prescale(update_rate_hz)]),
            self.write(MODE1_ADDR, [mode & ~SLEEP_BIT & 0xFF]),
        ]
        return lines


def set_channel_pulse(
    registers: PwmRegisters, channel: int, pulse_us: float, update_rate_hz: float
) -> list[str]:
    """Program one channel's pulse width; returns the byte-exact transactions.

    The ON count is always 0 (no phase staggering); the OFF count is the
    rounded 12-bit duty for the pulse.  Only channel ``channel``'s 4-byte
    block is touched.
    """
    if not 0 <= channel < CHANNEL_COUNT:
        raise ValueError(f"channel {channel} outside 0..15")
    off = pulse_to_off_count(pulse_us, update_rate_hz)
    base = CHANNEL_BASE_ADDR + 4 * channel
    payload = [0x00, 0x00, off & 0xFF, (off >> 8) & 0x0F]
    return [registers.write(base, payload)]


# --- range sensor -----------------------------------------------------------


@dataclass(frozen=True)
class RangeReading:
    """One ultrasonic measurement: distance in meters, or a timeout."""

    distance_m: float | None

    @property
    def is_timeout(self) -> bool:
        return self.distance_m is None

    @staticmethod
    def timeout() -> "RangeReading":
        return RangeReading(distance_m=None)


def range_from_echo(echo_duration_s: float) -> RangeReading:
    """Convert an echo round-trip time to a distance reading.

    distance = 343 m/s * duration / 2; echoes implying more than the 4 m
    rated range come back as a timeout.
    """
    if echo_duration_s < 0:
        raise ValueError("echo duration must be >= 0")
    distance = SPEED_OF_SOUND_MS * echo_duration_s / 2.0
    if distance > MAX_RANGE_M:
        return RangeReading.timeout()
    return RangeReading(distance_m=distance)


def echo_from_range(distance_m: float) -> float:
    """Round-trip echo time for a target distance (simulation feed-in)."""
    if distance_m < 0:
        raise ValueError("distance must be >= 0")
    return 2.0 * distance_m / SPEED_OF_SOUND_MS


# --- IMU --------------------------------------------------------------------


@dataclass(frozen=True)
class ImuSample:
    """Calibrated IMU output in the body frame.

    ``accel`` is specific force in m/s^2 (reads +g on z for a level body at
    rest); ``gyro`` is angular rate in deg/s.
    """

    accel: tuple[float, float, float]
    gyro: tuple[float, float, float]

    def __post_init__(self):
        for v in (*self.accel, *self.gyro):
            if not (v == v and abs(v) != float("inf")):
                raise ValueError("IMU sample components must be finite")


# --- event-only devices -----------------------------------------------------


@dataclass
class EventTrace:
    """Shared sink for timestamped device events (camera trigger, beep)."""

    events: list[tuple[float, str]] = field(default_factory=list)

    def emit(self, t_s: float, name: str) -> None:
        self.events.append((t_s, name))

    def since(self, t_s: float) -> list[str]:
        return [name for stamp, name in self.events if stamp >= t_s]


class CameraTrigger:
    """Shutter trigger only; image acquisition is out of scope."""

    def __init__(self, trace: EventTrace):
        self._trace = trace

    def shoot(self, t_s: float) -> None:
        self._trace.emit(t_s, "camera_trigger")


class Buzzer:
    def __init__(self, trace: EventTrace):
        self._trace = trace

    def beep(self, t_s: float) -> None:
        self._trace.emit(t_s, "beep")


class ServoBank:
    """Maps commanded leg angles onto PWM channels through the emulator.

    Commanded pose angles are [-90, +90] about the servo midpoint; channel
    ``leg * joints + joint`` gets the corresponding pulse.  Reading back
    decodes the programmed counts, so downstream consumers see exactly the
    quantized command the device would execute.
    """

    def __init__(self, spec: ServoSpec, joints_per_leg: int, update_rate_hz: float,
                 registers: PwmRegisters | None = None):
        self.spec = spec
        self.joints_per_leg = joints_per_leg
        self.update_rate_hz = update_rate_hz
        self.registers = registers if registers is not None else PwmRegisters()
        self.registers.configure_rate(update_rate_hz)

    def channel(self, leg_index: int, joint_index: int) -> int:
        return leg_index * self.joints_per_leg + joint_index

    def command_angle(self, leg_index: int, joint_index: int, pose_angle_deg: float) -> list[str]:
        servo_angle = pose_angle_deg + self.spec.angular_range_deg / 2.0
        pulse = angle_to_pulse(self.spec, servo_angle)
        return set_channel_pulse(
            self.registers, self.channel(leg_index, joint_index), pulse, self.update_rate_hz
        )

    def readback_angle(self, leg_index: int, joint_index: int) -> float:
        pulse = self.registers.channel_pulse_us(
            self.channel(leg_index, joint_index), self.update_rate_hz
        )
        return pulse_to_angle(self.spec, pulse) - self.spec.angular_range_deg / 2.0
