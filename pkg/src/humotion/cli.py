"""Command line front end.

Every command is a thin wrapper over the library: load inputs, call the
corresponding module, print the result as text or JSON. Exit codes are 0
for success, 1 when content failed validation, 2 for I/O problems.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import default_model
from .camera import (
    FOV_LIMIT,
    CameraError,
    distort,
    load_camera,
    undistort,
)
from .config import ConfigError, ConfigRegistry, default_registry
from .estimation import filter_update, fused_from_quat, initial_state
from .kinematics import PoseDomainError
from .motions import (
    POSE_SPACES,
    MotionError,
    default_library,
    load_motion,
    play,
    total_duration,
)
from .runlog import SessionLog
from .service import DATA_DIR_ENV, DEFAULT_PORT, WireError, convert_pose, resolve_data_dir
from .sim import ScenarioError, SimWorld, load_scenario, run_scenario

EXIT_VALIDATION = 1
EXIT_IO = 2


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _open_registry(data_dir: Path) -> ConfigRegistry:
    registry = default_registry(path=data_dir / "config.json")
    if registry.path.exists():
        try:
            registry.load()
        except (OSError, ValueError) as e:
            _fail(EXIT_IO, f"config file unreadable: {e}")
    return registry


def _read_json(path: str) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as e:
        _fail(EXIT_IO, str(e))
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        _fail(EXIT_VALIDATION, f"not valid JSON: {e}")


@click.group()
@click.option(
    "--data-dir",
    envvar=DATA_DIR_ENV,
    default=None,
    type=click.Path(path_type=Path),
    help="Directory for motions, config, and logs.",
)
@click.pass_context
def main(ctx: click.Context, data_dir: Path | None):
    """Tools for the humotion walking and motion stack."""
    ctx.obj = resolve_data_dir(data_dir)


@main.command()
@click.option("--from", "src", type=click.Choice(POSE_SPACES), required=True)
@click.option("--to", "dst", type=click.Choice(POSE_SPACES), required=True)
@click.argument("pose_file")
def convert(src: str, dst: str, pose_file: str):
    """Convert a pose document between joint, abstract, and inverse spaces.

    POSE_FILE is a JSON document, or - for stdin.
    """
    doc = _read_json(pose_file)
    try:
        pose, clamped = convert_pose(default_model(), src, dst, doc)
    except (WireError, PoseDomainError) as e:
        _fail(EXIT_VALIDATION, str(e))
    click.echo(json.dumps({"space": dst, "pose": pose, "clamped": clamped}, indent=2))


def _resolve_motion(name_or_path: str):
    path = Path(name_or_path)
    if path.suffix == ".json" or path.exists():
        try:
            return load_motion(path)
        except OSError as e:
            _fail(EXIT_IO, str(e))
    library = default_library()
    if name_or_path in library:
        return library.get(name_or_path)
    _fail(EXIT_VALIDATION, f"no motion named {name_or_path!r} in the library")


@main.command(name="play")
@click.argument("motion")
@click.option("--sim", is_flag=True, help="Execute on a simulated clamped test stand.")
@click.option("--rate", type=float, default=None, help="Playback rate, Hz.")
@click.pass_obj
def play_cmd(data_dir: Path, motion: str, sim: bool, rate: float | None):
    """Play a motion by library name or file path."""
    try:
        doc = _resolve_motion(motion)
    except MotionError as e:
        _fail(EXIT_VALIDATION, str(e))
    registry = _open_registry(data_dir)
    if rate is None:
        rate = registry.get("motion.playbackRate")
    report = {
        "name": doc.name,
        "duration": total_duration(doc),
        "frames": 0,
        "interrupt": None,
    }
    if not sim:
        for frame in play(doc, rate):
            report["frames"] += 1
            report["interrupt"] = frame.interrupt
        click.echo(json.dumps(report, indent=2))
        return

    model = default_model()
    timestep = registry.get("sim.timestep")
    fall_limit = registry.get("estimation.fallLimit")
    protect = registry.get("motion.fallProtection")
    first = doc.keyframes[0]
    world = SimWorld(
        model,
        joint_positions=first.positions,
        position=np.array([0.0, 0.0, 1.0]),
        fixed_base=True,
        seed=0,
        timestep=timestep,
    )
    est = initial_state(kp=registry.get("estimation.kp"), ti=registry.get("estimation.ti"))

    def attitude():
        return fused_from_quat(est.orientation)

    worst = 0.0
    total_err = 0.0
    prev_t = 0.0
    for frame in play(doc, rate, attitude_source=attitude if protect else None, fall_limit=fall_limit):
        report["frames"] += 1
        report["interrupt"] = frame.interrupt
        span = frame.t - prev_t
        prev_t = frame.t
        if span > 0.0:
            n = max(1, math.ceil(span / timestep - 1e-9))
            while span / n > timestep:
                n += 1
            for _ in range(n):
                sample, _ = world.step(frame.command, span / n)
                est = filter_update(est, sample, span / n)
        err = float(np.max(np.abs(frame.command.position - world.joint_positions)))
        worst = max(worst, err)
        total_err += err
    report["maxTrackingError"] = worst
    report["meanTrackingError"] = total_err / max(report["frames"], 1)
    click.echo(json.dumps(report, indent=2))


@main.command()
@click.option("--scenario", "scenario_file", required=True, type=click.Path(path_type=Path))
@click.option("--log-dir", type=click.Path(path_type=Path), default=None)
@click.pass_obj
def walk(data_dir: Path, scenario_file: Path, log_dir: Path | None):
    """Run a closed-loop walking scenario and report its metrics."""
    try:
        scenario = load_scenario(scenario_file)
    except ScenarioError as e:
        code = EXIT_IO if isinstance(e.__cause__, OSError) else EXIT_VALIDATION
        _fail(code, str(e))
    registry = _open_registry(data_dir)
    if log_dir is None:
        log_dir = data_dir / registry.get("logging.directory")
    with SessionLog(log_dir) as session:
        session.event("scenarioStart", t=0.0, scenario=scenario.get("name", ""))
        try:
            metrics = run_scenario(scenario, log_path=session.csv_path)
        except ScenarioError as e:
            _fail(EXIT_VALIDATION, str(e))
        if metrics.fell:
            session.event("fall", t=metrics.steps * 0.01)
        session.event("complete", t=metrics.steps * 0.01, **metrics.as_dict())
        out = dict(metrics.as_dict())
        out["runId"] = session.run_id
        out["log"] = str(session.csv_path)
    click.echo(json.dumps(out, indent=2))
    sys.exit(0)


@main.command()
@click.argument("motion_file", type=click.Path(path_type=Path))
def validate(motion_file: Path):
    """Check a motion file against the schema and joint limits."""
    try:
        motion = load_motion(motion_file)
    except MotionError as e:
        _fail(EXIT_VALIDATION, str(e))
    except OSError as e:
        _fail(EXIT_IO, str(e))
    click.echo(
        f"ok: {motion.name!r}, {len(motion.keyframes)} frames, "
        f"{total_duration(motion):.2f} s, precondition {motion.precondition}"
    )


@main.command(name="calib-check")
@click.argument("camera_file", type=click.Path(path_type=Path))
def calib_check(camera_file: Path):
    """Report the undistortion round trip for a camera calibration."""
    try:
        camera = load_camera(camera_file)
    except CameraError as e:
        _fail(EXIT_VALIDATION, str(e))
    except OSError as e:
        _fail(EXIT_IO, str(e))
    grid = np.linspace(-FOV_LIMIT, FOV_LIMIT, 25)
    worst = 0.0
    iterations = []
    converged = 0
    count = 0
    for x in grid:
        for y in grid:
            true = np.array([x, y])
            result = undistort(camera, distort(camera, true))
            worst = max(worst, float(np.max(np.abs(result.point - true))))
            iterations.append(result.iterations)
            converged += bool(result.converged)
            count += 1
    fast = sum(1 for n in iterations if n <= 10) / count
    click.echo(f"grid points: {count}")
    click.echo(f"round-trip max error: {worst:.3e}")
    click.echo(f"converged: {converged}/{count}")
    click.echo(f"within 10 iterations: {100.0 * fast:.1f}%")
    click.echo(f"iteration max: {max(iterations)}")
    if converged < count or worst > 1e-9:
        _fail(EXIT_VALIDATION, "round trip out of tolerance")


@main.command()
@click.option("--port", type=int, default=DEFAULT_PORT, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--editor-dir",
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    default=None,
    envvar="HUMOTION_EDITOR_DIR",
    help="Serve a built browser editor from / alongside the API.",
)
@click.pass_obj
def serve(data_dir: Path, port: int, host: str, editor_dir: Path | None):
    """Run the HTTP/WebSocket service."""
    import uvicorn

    from .service import create_app

    app = create_app(data_dir, editor_dir=editor_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.group()
def config():
    """Read and edit persisted parameters."""


@config.command(name="get")
@click.argument("key")
@click.pass_obj
def config_get(data_dir: Path, key: str):
    registry = _open_registry(data_dir)
    try:
        click.echo(json.dumps(registry.get(key)))
    except KeyError as e:
        _fail(EXIT_VALIDATION, str(e.args[0]))


@config.command(name="set")
@click.argument("key")
@click.argument("value")
@click.pass_obj
def config_set(data_dir: Path, key: str, value: str):
    registry = _open_registry(data_dir)
    try:
        registry.set(key, registry.parse_text(key, value))
    except KeyError as e:
        _fail(EXIT_VALIDATION, str(e.args[0]))
    except (TypeError, ConfigError) as e:
        _fail(EXIT_VALIDATION, str(e))
    try:
        registry.save()
    except OSError as e:
        _fail(EXIT_IO, str(e))
    click.echo(json.dumps(registry.get(key)))


@config.command(name="dump")
@click.pass_obj
def config_dump(data_dir: Path):
    registry = _open_registry(data_dir)
    click.echo(json.dumps([registry.describe(k) for k in registry.keys()], indent=2))


if __name__ == "__main__":
    main()
