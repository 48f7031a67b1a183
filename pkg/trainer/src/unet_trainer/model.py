"""U-Net builder: symmetric encoder/decoder with skip connections."""

from __future__ import annotations

import keras
from keras import layers

from .config import NetConfig


def _conv_block(x, filters: int, dropout_rate: float):
    """Two 3x3 convolutions, each ReLU then batch-norm, then level dropout."""
    for _ in range(2):
        x = layers.Conv2D(filters, 3, padding="same", kernel_initializer="he_normal")(x)
        x = layers.ReLU()(x)
        x = layers.BatchNormalization()(x)
    if dropout_rate > 0:
        x = layers.Dropout(dropout_rate)(x)
    return x


def build_model(cfg: NetConfig | None = None) -> keras.Model:
    """Build the network; a forward pass maps (H, W, 1) to (H, W, 1) in [0, 1].

    Feature widths double at every pooling step down the encoder and halve
    at every 4x4 stride-2 transposed convolution up the decoder.
    """
    cfg = cfg or NetConfig()
    inputs = keras.Input(shape=(cfg.input_size, cfg.input_size, 1))
    rates = cfg.dropout_rates

    x = inputs
    skips = []
    filters = cfg.base_filters
    for level in range(cfg.depth - 1):
        x = _conv_block(x, filters, rates[level])
        skips.append(x)
        x = layers.MaxPooling2D(2)(x)
        filters *= 2

    x = _conv_block(x, filters, rates[cfg.depth - 1])

    for level in range(cfg.depth - 1):
        filters //= 2
        x = layers.Conv2DTranspose(filters, 4, strides=2, padding="same",
                                   kernel_initializer="he_normal")(x)
        x = layers.Concatenate()([skips.pop(), x])
        x = _conv_block(x, filters, rates[cfg.depth + level])

    outputs = layers.Conv2D(1, 1, activation="sigmoid", kernel_initializer="he_normal")(x)
    return keras.Model(inputs, outputs, name="unet")


def conv_widths(model: keras.Model) -> list[int]:
    """Filter counts of the 3x3 conv blocks, in graph order (head excluded)."""
    widths = []
    for layer in model.layers:
        if isinstance(layer, layers.Conv2D) and not isinstance(layer, layers.Conv2DTranspose):
            if layer.kernel_size == (3, 3):
                widths.append(layer.filters)
    return widths


def dropout_schedule(model: keras.Model) -> list[float]:
    """Dropout rates in graph order, one per level."""
    return [layer.rate for layer in model.layers if isinstance(layer, layers.Dropout)]
