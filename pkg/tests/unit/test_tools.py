"""Unit tests for command tools."""

from pathlib import Path

import numpy as np
import polars as pl
import pytest

from nearfield_dap.config import CSV_SCHEMA_VERSION, SweepConfig


class TestAnalysisTools:
    """Tests for spectrum and capacity tools."""

    @pytest.mark.asyncio
    async def test_compute_dof(self, small_config: SweepConfig) -> None:
        """Test the spectrum summary of the first configured distance."""
        from nearfield_dap.tools.analysis import compute_dof

        result = await compute_dof(small_config, count=10)

        assert result["distance"] == 0.2
        assert result["c_y"] == pytest.approx(5.66, abs=0.01)
        assert len(result["rows"]) == 10
        assert result["rows"][0]["index"] == 0
        assert result["output_path"] is None
        assert result["schema_version"] == CSV_SCHEMA_VERSION

    @pytest.mark.asyncio
    async def test_compute_dof_writes_csv(self, small_config: SweepConfig, tmp_path: Path) -> None:
        """Test writing the spectrum rows."""
        from nearfield_dap.tools.analysis import compute_dof

        out = tmp_path / "dof.csv"
        result = await compute_dof(small_config, distance=0.5, count=4, out=out)

        assert result["output_path"] == str(out)
        assert pl.read_csv(out).columns == ["index", "eigenvalue"]

    @pytest.mark.asyncio
    async def test_compute_dof_bad_distance(self, small_config: SweepConfig) -> None:
        """Test that a nonpositive distance returns an error."""
        from nearfield_dap.tools.analysis import compute_dof

        result = await compute_dof(small_config, distance=-1.0)

        assert "error" in result
        assert "distance must be positive" in result["error"]

    @pytest.mark.asyncio
    async def test_unwritable_output(self, small_config: SweepConfig, tmp_path: Path) -> None:
        """Test that an unwritable path returns an error."""
        from nearfield_dap.tools.analysis import compute_dof

        blocker = tmp_path / "file"
        blocker.write_text("")
        result = await compute_dof(small_config, count=4, out=blocker / "dof.csv")

        assert "cannot write output" in result["error"]

    @pytest.mark.asyncio
    async def test_compute_capacity(self, small_config: SweepConfig) -> None:
        """Test capacity rows and the optimal DoF summary."""
        from nearfield_dap.tools.analysis import compute_capacity

        result = await compute_capacity(small_config.with_overrides(channel_power=1.0))

        assert [row["r"] for row in result["rows"]] == [0.2, 0.5]
        assert result["channel_power"] == 1.0
        assert result["optimal_dof"] > 0.0
        assert result["peak_distance"] in (0.2, 0.5)


class TestPrecodeTool:
    """Tests for the DAP precoding tool."""

    @pytest.mark.asyncio
    async def test_precode(self, small_config: SweepConfig, tmp_path: Path) -> None:
        """Test the summary, constraint checks and channel file."""
        from nearfield_dap.services.storage import ChannelStore
        from nearfield_dap.tools.precoding import precode

        channel_out = tmp_path / "channel.npz"
        result = await precode(small_config, streams=4, channel_out=channel_out)

        assert result["ns"] == 4
        assert sum(result["subarray_sizes"]) == 32
        assert all(result["constraints"].values())
        assert result["se_bits"] <= result["capacity_bits"] + 1e-9
        assert result["se_bits"] <= result["jensen_bound_bits"] + 1e-9
        assert len(result["rows"]) == 4

        stored = ChannelStore(channel_out).load()
        assert stored is not None
        assert stored.entries.shape == (32, 32)
        assert np.isclose(stored.power, 1.0)

    @pytest.mark.asyncio
    async def test_precode_too_many_streams(self, small_config: SweepConfig) -> None:
        """Test that an infeasible stream count returns an error."""
        from nearfield_dap.tools.precoding import precode

        result = await precode(small_config, streams=64)

        assert "infeasible partition" in result["error"]


class TestExperimentTools:
    """Tests for comparison, sweep and figure tools."""

    @pytest.mark.asyncio
    async def test_compare_architectures(self, small_config: SweepConfig) -> None:
        """Test one row per architecture with fully-digital ahead on SE."""
        from nearfield_dap.tools.experiments import compare_architectures

        result = await compare_architectures(small_config, distance=0.5, snr_db=25.0)

        assert [row["architecture"] for row in result["rows"]] == small_config.architectures
        assert result["best_se_architecture"] == "fully_digital"
        assert result["snr_db"] == 25.0

    @pytest.mark.asyncio
    async def test_sweep(self, small_config: SweepConfig) -> None:
        """Test the sweep summary and its CSV."""
        from nearfield_dap.tools.experiments import sweep

        result = await sweep(small_config)

        assert result == {
            "points": 8,
            "failed": 0,
            "output_path": str(small_config.output_path),
            "schema_version": CSV_SCHEMA_VERSION,
        }
        assert small_config.output_path.exists()

    @pytest.mark.asyncio
    async def test_build_figure(self, small_config: SweepConfig, tmp_path: Path) -> None:
        """Test writing a singular-value figure."""
        from nearfield_dap.tools.experiments import build_figure

        config = small_config.with_overrides(
            spectrum_count=5, output_path=tmp_path / "fig2.csv"
        )
        result = await build_figure(config, "fig2")

        assert result["rows"] == 10
        assert result["columns"] == ["distance", "index", "sv_calculated", "sv_estimated"]
        assert pl.read_csv(tmp_path / "fig2.csv").height == 10
        assert result["schema_version"] == CSV_SCHEMA_VERSION

    @pytest.mark.asyncio
    async def test_build_figure_unknown(self, small_config: SweepConfig) -> None:
        """Test that an unknown figure returns an error."""
        from nearfield_dap.tools.experiments import build_figure

        result = await build_figure(small_config, "fig4")

        assert "unknown figure" in result["error"]
