#!/usr/bin/env python3
# Copyright 2026 The smicqa Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Export a VGG16-topology feature extractor to ONNX.

The graph returns the last activation of each of the five convolutional
blocks under the names relu1_2, relu2_2, relu3_3, relu4_3 and relu5_3, with
dynamic height and width.

  export_vgg16.py vgg16.onnx --weights imagenet      # torchvision weights
  export_vgg16.py vgg16.onnx --weights path/to.pth   # state dict of vgg16
  export_vgg16.py mini.onnx --weights random --widths 4,8,16,32,32
  export_vgg16.py four.onnx --weights random --widths 4,8,16,32,32 --taps 4
"""

import argparse
import sys
import warnings

import torch
from torch import nn

TAPS = ["relu1_2", "relu2_2", "relu3_3", "relu4_3", "relu5_3"]
CONVS_PER_BLOCK = [2, 2, 3, 3, 3]
VGG16_WIDTHS = [64, 128, 256, 512, 512]


def build_features(widths):
    layers = []
    in_ch = 3
    for block, (count, width) in enumerate(zip(CONVS_PER_BLOCK, widths)):
        if block > 0:
            layers.append(nn.MaxPool2d(kernel_size=2, stride=2))
        for _ in range(count):
            layers.append(nn.Conv2d(in_ch, width, kernel_size=3, padding=1))
            layers.append(nn.ReLU(inplace=False))
            in_ch = width
    return nn.Sequential(*layers)


def tap_indices():
    # index of the ReLU closing each block inside the Sequential
    idx, out = 0, []
    for block, count in enumerate(CONVS_PER_BLOCK):
        if block > 0:
            idx += 1
        idx += 2 * count
        out.append(idx - 1)
    return out


class Taps(nn.Module):
    def __init__(self, features, count):
        super().__init__()
        self.features = features
        self.taps = tap_indices()[:count]

    def forward(self, x):
        outs = []
        for i, layer in enumerate(self.features):
            x = layer(x)
            if i in self.taps:
                outs.append(x)
            if len(outs) == len(self.taps):
                break
        return tuple(outs)


def load_weights(features, weights):
    if weights == "random":
        return
    if weights == "imagenet":
        from torchvision.models import VGG16_Weights, vgg16

        model = vgg16(weights=VGG16_Weights.IMAGENET1K_V1)
        features.load_state_dict(model.features.state_dict())
        return
    state = torch.load(weights, map_location="cpu")
    if "state_dict" in state:
        state = state["state_dict"]
    prefixed = {k[len("features."):]: v for k, v in state.items() if k.startswith("features.")}
    features.load_state_dict(prefixed or state)


def main(argv):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("output")
    ap.add_argument("--weights", default="imagenet", help="imagenet, random, or a .pth file")
    ap.add_argument("--widths", default=",".join(map(str, VGG16_WIDTHS)))
    ap.add_argument("--taps", type=int, default=5, help="number of taps to expose")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    warnings.filterwarnings("ignore", category=DeprecationWarning)
    widths = [int(w) for w in args.widths.split(",")]
    if len(widths) != 5:
        ap.error("--widths needs 5 entries")
    torch.manual_seed(args.seed)
    features = build_features(widths)
    load_weights(features, args.weights)
    model = Taps(features, args.taps).eval()

    names = TAPS[: args.taps]
    dynamic = {"input": {2: "height", 3: "width"}}
    dynamic.update({n: {2: "h_" + n, 3: "w_" + n} for n in names})
    with torch.no_grad():
        torch.onnx.export(
            model,
            torch.zeros(1, 3, 64, 64),
            args.output,
            input_names=["input"],
            output_names=names,
            dynamic_axes=dynamic,
            opset_version=11,
            dynamo=False,
        )
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
