"""Channel matrix files.

Channels are stored as compressed ``.npz`` archives holding the complex
entries, the wavelength and the propagation model tag.
"""

import logging
from pathlib import Path
from typing import cast, get_args

import numpy as np

from nearfield_dap.models.errors import GeometryError
from nearfield_dap.models.types import ChannelMatrix, ModelTag

logger = logging.getLogger(__name__)


class ChannelStore:
    """Save and load channel matrices.

    Attributes:
        path: Location of the ``.npz`` file
    """

    def __init__(self, path: Path) -> None:
        self.path = path

    def save(self, channel: ChannelMatrix) -> None:
        """Write a channel to disk, creating parent directories."""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        logger.info(
            f"[Near-field DAP] Saving channel {channel.num_rx}x{channel.num_tx} to {self.path}"
        )
        with self.path.open("wb") as handle:
            np.savez_compressed(
                handle,
                entries=channel.entries,
                wavelength=np.array(channel.wavelength),
                model_tag=np.array(channel.model_tag),
            )

    def load(self) -> ChannelMatrix | None:
        """Read the channel file.

        Returns:
            The stored channel, or None if the file does not exist

        Raises:
            GeometryError: If the file lacks a required array
        """
        if not self.path.exists():
            logger.info(f"[Near-field DAP] No channel file at {self.path}")
            return None

        logger.info(f"[Near-field DAP] Loading channel from {self.path}")
        with np.load(self.path, allow_pickle=False) as data:
            missing = {"entries", "wavelength", "model_tag"} - set(data.files)
            if missing:
                raise GeometryError(f"channel file {self.path} lacks {sorted(missing)}")
            model_tag = str(data["model_tag"])
            if model_tag not in get_args(ModelTag):
                raise GeometryError(f"unknown channel model tag '{model_tag}'")
            return ChannelMatrix(
                entries=data["entries"],
                wavelength=float(data["wavelength"]),
                model_tag=cast(ModelTag, model_tag),
            )

