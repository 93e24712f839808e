from .messages import UplinkMessage, DownlinkMessage, make_uplink, make_downlink
from .sketch import GAUSSIAN, COORDINATE, SketchSpec, sample_sketch
from .bits import UplinkBreakdown, uplink_breakdown, uplink_bits, baseline_uplink_bits, downlink_bits, BitLedger
