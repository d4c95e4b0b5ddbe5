"""
The servo path, byte by byte
============================

Commanded angles become pulse widths, pulse widths become 12-bit counts,
and counts are written into the emulated 16-channel PWM driver as I2C
transactions.  Every line below is exactly what would cross the bus.
"""

from quadstack import data
from quadstack.config import load_config
from quadstack.hal import (
    PwmRegisters,
    angle_to_pulse,
    compute_prescale,
    pulse_to_angle,
    set_channel_pulse,
)

servo = load_config(data.config_path("locoquad-2j")).servo

# The refresh rate is programmed through the prescale register, which the
# device only accepts while asleep.
print(f"prescale for 50 Hz: {compute_prescale(50)} (0x{compute_prescale(50):02x})")

regs = PwmRegisters()
print("power-on sleep bit:", regs.sleeping)
for line in regs.configure_rate(50.0):
    print(" ", line)

# Drive channel 3 to mid-range: 90 deg -> 1500 us -> OFF count 307.
pulse = angle_to_pulse(servo, 90.0)
for line in set_channel_pulse(regs, 3, pulse, 50.0):
    print(" ", line)
on, off = regs.channel_counts(3)
print(f"channel 3 counts: ON={on}, OFF={off}")

# Reading the registers back recovers the angle to within one count.
decoded = pulse_to_angle(servo, regs.channel_pulse_us(3, 50.0))
print(f"decoded angle: {decoded:.3f} deg (quantization is 12-bit)")

# The transaction log is the conformance surface the tests check.
print(f"{len(regs.transactions)} transactions logged")
