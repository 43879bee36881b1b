"""External evaluator speaking the line protocol; computes the cross-Wigner distribution."""

import sys

from metatfr.io import read_field, write_field
from metatfr.tfr import wigner_fast

for line in sys.stdin:
    parts = line.split()
    if len(parts) != 4 or parts[0] != "eval":
        print("err bad request", flush=True)
        continue
    try:
        write_field(parts[3], wigner_fast(read_field(parts[1]), read_field(parts[2])))
    except Exception as exc:  # report every failure over the protocol
        print(f"err {exc}", flush=True)
        continue
    print("ok", flush=True)
