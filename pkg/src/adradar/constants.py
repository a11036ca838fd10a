"""Physical and 802.11ad PHY constants shared across modules."""

SPEED_OF_LIGHT = 3e8  # m/s, rounded as used throughout the radar design math
CHIP_RATE = 1.76e9  # Hz, CPHY/SCPHY
CHIP_TIME = 1.0 / CHIP_RATE
CARRIER_FREQ = 60e9
WAVELENGTH = SPEED_OF_LIGHT / CARRIER_FREQ  # 5 mm

CEF_LEN = 1152
GOLAY_BLOCK = 128
