# ntkit/tests/fixtures/stack_reference.py
#
# Copyright 2026 The ntkit Authors
# SPDX-License-Identifier: Apache-2.0

# Reference for the 3x stacking frontend: output frame t concatenates raw
# frames 3t-2, 3t-1, 3t, with negative indices clamped to raw frame 0.
import json, math, sys

def stack(raw):
    out = []
    for t in range(math.ceil(len(raw) / 3)):
        row = []
        for k in (3 * t - 2, 3 * t - 1, 3 * t):
            row += raw[max(0, k)]
        out.append(row)
    return out

raw = [[float(i)] for i in range(1, 10)]
print(json.dumps(stack(raw)))
raw10 = [[float(i), float(-i)] for i in range(1, 11)]
print(json.dumps(stack(raw10)))
