"""Bi-encoder and cross-encoder classifiers over a frozen text backbone."""

from topicguard.classifiers.artifacts import (
    ArtifactError,
    PROBE_PAIRS,
    load_model,
    probe_predictions,
    save_model,
)
from topicguard.classifiers.backbone import (
    BackboneError,
    HashingBackbone,
    TextBackbone,
    register_backbone,
    resolve_backbone,
    tokenize,
)
from topicguard.classifiers.layers import (
    AttentionPooling,
    BottleneckAdapter,
    ClassificationHead,
    CrossAttention,
    LayerConfigError,
    PoolingError,
    attention_pool,
    masked_softmax,
)
from topicguard.classifiers.models import (
    BOS_TOKEN,
    EOS_TOKEN,
    KINDS,
    SEP_TOKEN,
    TRUNCATION_POLICIES,
    BiEncoderConfig,
    BiEncoderNet,
    CrossEncoderConfig,
    CrossEncoderNet,
    GuardrailModel,
    ModelConfigError,
    build_cross_input,
    build_model,
    config_from_dict,
    default_config,
)
from topicguard.classifiers.training import TrainConfig, TrainingError, train

__all__ = [
    "BOS_TOKEN",
    "EOS_TOKEN",
    "KINDS",
    "PROBE_PAIRS",
    "SEP_TOKEN",
    "TRUNCATION_POLICIES",
    "ArtifactError",
    "AttentionPooling",
    "BackboneError",
    "BiEncoderConfig",
    "BiEncoderNet",
    "BottleneckAdapter",
    "ClassificationHead",
    "CrossAttention",
    "CrossEncoderConfig",
    "CrossEncoderNet",
    "GuardrailModel",
    "HashingBackbone",
    "LayerConfigError",
    "ModelConfigError",
    "PoolingError",
    "TextBackbone",
    "TrainConfig",
    "TrainingError",
    "attention_pool",
    "build_cross_input",
    "build_model",
    "config_from_dict",
    "default_config",
    "load_model",
    "masked_softmax",
    "probe_predictions",
    "register_backbone",
    "resolve_backbone",
    "save_model",
    "tokenize",
    "train",
]
