#!/usr/bin/env python3
# Copyright 2026 The MaskText Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Builds a small dataset, runs `masktext transcribe` and validates every
record against docs/record.schema.json."""

import argparse
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
import numpy as np
from PIL import Image

CONFIG = """[dataset]
root = .
split = val
image_ext = .png

[palette]
encoding = index
1 = buildings | destroyed
2 = refugee camp | newly established
3 = greenhouse | newly built
"""


def write_dataset(root: pathlib.Path, n: int) -> pathlib.Path:
    rng = np.random.default_rng(5)
    for sub in ("A", "B", "label"):
        (root / sub).mkdir()
    for i in range(n):
        h, w = rng.integers(40, 200, size=2)
        label = np.zeros((h, w), dtype=np.uint8)
        for _ in range(rng.integers(0, 5)):
            y0, x0 = rng.integers(0, h), rng.integers(0, w)
            label[y0:y0 + rng.integers(1, 60), x0:x0 + rng.integers(1, 60)] = rng.integers(1, 4)
        name = f"tile_{i:03d}.png"
        Image.fromarray(label, mode="L").save(root / "label" / name)
        rgb = rng.integers(0, 255, size=(h, w, 3), dtype=np.uint8)
        Image.fromarray(rgb).save(root / "A" / name)
        Image.fromarray(255 - rgb).save(root / "B" / name)
    config = root / "config.ini"
    config.write_text(CONFIG)
    return config


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--schema", required=True)
    args = ap.parse_args()
    schema = json.loads(pathlib.Path(args.schema).read_text())
    validator = jsonschema.Draft202012Validator(schema)

    checked = 0
    with tempfile.TemporaryDirectory() as tmp:
        root = pathlib.Path(tmp)
        config = write_dataset(root, 40)
        for attrs in ("all", "none", "type,category", "quantity,location"):
            out = root / ("out_" + attrs.replace(",", "_"))
            subprocess.run([args.cli, "transcribe", str(config), "--attrs", attrs,
                            "--seed", "3", "--out", str(out)],
                           check=True, stdout=subprocess.DEVNULL)
            lines = (out / "val.mm.jsonl").read_text().splitlines()
            if len(lines) != 40:
                print(f"{attrs}: expected 40 records, got {len(lines)}")
                return 1
            for line in lines:
                record = json.loads(line)
                errors = sorted(validator.iter_errors(record), key=str)
                if errors:
                    print(f"{attrs}: {record['image_id']}: {errors[0].message}")
                    return 1
                if list(record) != schema["required"]:
                    print(f"{attrs}: key order {list(record)}")
                    return 1
                checked += 1
    print(f"{checked} records valid")
    return 0


if __name__ == "__main__":
    sys.exit(main())
