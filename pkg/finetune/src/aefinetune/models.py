"""Backbone construction: four torchvision architectures with a K-class head.

``pretrained=True`` loads ImageNet weights (network access or a local cache
required); ``pretrained=False`` builds randomly initialized copies, which is
what the tests use. GoogLeNet's auxiliary classifier heads are disabled --
only the main head is trained and evaluated.
"""

from __future__ import annotations

import torch.nn as nn
from torchvision import models as tv

ARCHITECTURES = ("googlenet", "resnet18", "mobilenet_v2", "efficientnet_b5")


def build_model(architecture: str, n_classes: int = 7, pretrained: bool = True,
                freeze: bool = False) -> nn.Module:
    if architecture not in ARCHITECTURES:
        raise ValueError(f"unsupported architecture {architecture!r}; pick from {ARCHITECTURES}")

    if architecture == "googlenet":
        if pretrained:
            model = tv.googlenet(weights=tv.GoogLeNet_Weights.IMAGENET1K_V1)
        else:
            model = tv.googlenet(weights=None, aux_logits=False, init_weights=True)
        model.aux_logits = False
        model.aux1 = None
        model.aux2 = None
        head_parent, head_name = model, "fc"
    elif architecture == "resnet18":
        model = tv.resnet18(weights=tv.ResNet18_Weights.IMAGENET1K_V1 if pretrained else None)
        head_parent, head_name = model, "fc"
    elif architecture == "mobilenet_v2":
        model = tv.mobilenet_v2(
            weights=tv.MobileNet_V2_Weights.IMAGENET1K_V1 if pretrained else None
        )
        head_parent, head_name = model.classifier, "1"
    else:
        model = tv.efficientnet_b5(
            weights=tv.EfficientNet_B5_Weights.IMAGENET1K_V1 if pretrained else None
        )
        head_parent, head_name = model.classifier, "1"

    old_head: nn.Linear = getattr(head_parent, head_name)
    new_head = nn.Linear(old_head.in_features, n_classes)
    setattr(head_parent, head_name, new_head)

    if freeze:
        for param in model.parameters():
            param.requires_grad = False
        for param in new_head.parameters():
            param.requires_grad = True
    return model


def trainable_parameters(model: nn.Module):
    return [p for p in model.parameters() if p.requires_grad]
