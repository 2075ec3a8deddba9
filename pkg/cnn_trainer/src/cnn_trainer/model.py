"""Transfer-learning models: frozen pretrained-architecture backbones with a
small trainable head.

Two backbones are supported. ``vgg16`` keeps only the convolutional stage
and flattens its 7x7x512 output; ``densenet121`` keeps the whole module
(its original 1000-way classifier stays inside, frozen and unused) and taps
the 1024-wide global-average-pooled features. The published parameter
censuses this code is held to count the models exactly that way, so the
structure is part of the contract:

    vgg16        total 21,137,729 = 14,714,688 frozen + 6,423,041 trainable
    densenet121  total  8,241,513 =  7,978,856 frozen +   262,657 trainable
"""

from dataclasses import dataclass

import torch
from torch import nn

from .errors import BackboneUnavailableError, InvalidParamsError

BACKBONES = ("vgg16", "densenet121")


@dataclass(frozen=True)
class HeadConfig:
    """Classifier head shared by both backbones: Dense(ReLU) -> Dropout ->
    Dense(sigmoid). ``weights=None`` builds randomly initialized backbones;
    ``weights="imagenet"`` loads the pretrained weights from the framework
    cache (network download on first use)."""

    backbone: str
    dense_units: int = 256
    dropout: float = 0.5
    weights: str | None = None

    def __post_init__(self):
        if self.backbone not in BACKBONES:
            raise InvalidParamsError(f"backbone must be one of {BACKBONES}, got {self.backbone!r}")
        if self.dense_units < 1:
            raise InvalidParamsError("dense_units must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise InvalidParamsError("dropout must be in [0, 1)")
        if self.weights not in (None, "imagenet"):
            raise InvalidParamsError(f"weights must be None or 'imagenet', got {self.weights!r}")


@dataclass(frozen=True)
class ParameterCensus:
    total: int
    trainable: int
    non_trainable: int


class TransferModel(nn.Module):
    """Frozen backbone + trainable head; forward returns sigmoid scores."""

    def __init__(self, backbone_name: str, backbone: nn.Module, feature_dim: int,
                 dense_units: int, dropout: float):
        super().__init__()
        self.backbone_name = backbone_name
        self.backbone = backbone
        self.feature_dim = feature_dim
        self.head = nn.Sequential(
            nn.Linear(feature_dim, dense_units),
            nn.ReLU(),
            nn.Dropout(dropout),
            nn.Linear(dense_units, 1),
        )

    def train(self, mode: bool = True):
        # the backbone is frozen: keep it in eval mode even while the head
        # trains, so batch-norm running statistics never move
        super().train(mode)
        self.backbone.eval()
        return self

    def features(self, x: torch.Tensor) -> torch.Tensor:
        if self.backbone_name == "vgg16":
            return torch.flatten(self.backbone(x), 1)
        feat = self.backbone.features(x)
        feat = torch.relu(feat)
        feat = torch.nn.functional.adaptive_avg_pool2d(feat, 1)
        return torch.flatten(feat, 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return torch.sigmoid(self.head(self.features(x)))[:, 0]


def _load_backbone(name: str, weights: str | None) -> nn.Module:
    import torchvision.models as tvm

    ctor = {"vgg16": tvm.vgg16, "densenet121": tvm.densenet121}[name]
    kwargs = {"weights": None}
    if weights == "imagenet":
        kwargs["weights"] = {"vgg16": tvm.VGG16_Weights.IMAGENET1K_V1,
                             "densenet121": tvm.DenseNet121_Weights.IMAGENET1K_V1}[name]
    try:
        module = ctor(**kwargs)
    except Exception as exc:  # download/cache failures surface as one error kind
        raise BackboneUnavailableError(f"cannot load {name} weights: {exc}") from exc
    return module.features if name == "vgg16" else module


def parameter_census(model: nn.Module) -> ParameterCensus:
    trainable = sum(p.numel() for p in model.parameters() if p.requires_grad)
    frozen = sum(p.numel() for p in model.parameters() if not p.requires_grad)
    return ParameterCensus(total=trainable + frozen, trainable=trainable, non_trainable=frozen)


def build_model(head: HeadConfig):
    """Build the frozen-backbone classifier and report its parameter census."""
    backbone = _load_backbone(head.backbone, head.weights)
    for p in backbone.parameters():
        p.requires_grad_(False)
    feature_dim = {"vgg16": 512 * 7 * 7, "densenet121": 1024}[head.backbone]
    model = TransferModel(head.backbone, backbone, feature_dim, head.dense_units, head.dropout)
    return model, parameter_census(model)
