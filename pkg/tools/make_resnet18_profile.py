"""Regenerate src/splitplan/data/resnet18.json from the ResNet-18 layer table.

Counts 2 FLOPs per multiply-accumulate for conv and linear layers only.
Run from the repository root: ``python3 tools/make_resnet18_profile.py``.
"""
import json
from pathlib import Path

INPUT_HW = 224
NUM_CLASSES = 1000
BITS_PER_ELEMENT = 32
BP_FACTOR = 2


def conv_flops(c_in, c_out, k, h_out, w_out):
    return 2 * c_in * k * k * c_out * h_out * w_out


def basic_block(c_in, c_out, hw_in, stride):
    hw = hw_in // stride
    flops = conv_flops(c_in, c_out, 3, hw, hw) + conv_flops(c_out, c_out, 3, hw, hw)
    if stride != 1 or c_in != c_out:
        flops += conv_flops(c_in, c_out, 1, hw, hw)
    return flops, c_out * hw * hw, hw


def main():
    names, fp, act = [], [], []
    # stem: 7x7/2 conv to 112, then 3x3/2 maxpool to 56
    names.append("stem")
    fp.append(conv_flops(3, 64, 7, INPUT_HW // 2, INPUT_HW // 2))
    hw = INPUT_HW // 4
    act.append(64 * hw * hw)
    c = 64
    for stage, c_out in enumerate((64, 128, 256, 512), start=1):
        for blk in range(2):
            stride = 2 if (blk == 0 and stage > 1) else 1
            flops, elems, hw = basic_block(c, c_out, hw, stride)
            names.append(f"layer{stage}.{blk}")
            fp.append(flops)
            act.append(elems)
            c = c_out
    names.append("classifier")
    fp.append(2 * c * NUM_CLASSES)
    act.append(NUM_CLASSES)

    doc = {
        "layers": len(fp),
        "layer_names": names,
        "fp_flops": fp,
        "bp_flops": [BP_FACTOR * v for v in fp],
        "activation_bits": [BITS_PER_ELEMENT * a for a in act],
    }
    out = Path(__file__).resolve().parent.parent / "src" / "splitplan" / "data" / "resnet18.json"
    out.write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {out} ({len(fp)} layers, {sum(fp) / 1e9:.3f} GFLOPs FP)")


if __name__ == "__main__":
    main()
