use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rlfc::error::{CliError, CliResult};
use rlfc::eval::{quality, run_sweep, write_csv, QualityRow, SweepParam, SweepSpec};
use rlfc::manifest::{export_grid, load_manifest, read_manifest};
use rlfc::parallel::{decode_all, render_view};
use rlfc::png::{encode_rgb, StdCodecs};
use rlfc::service::{serve, AppState};
use rlfc_core::render::{CameraPose, LightSlab, Projection, RenderOptions};
use rlfc_core::synth::{synthesize_lightfield, SyntheticSpec};
use rlfc_core::{compress, CodecId, DecoderState, EncodingParams, FilterSpec};

#[derive(Parser, Debug)]
#[command(name = "rlfc", version, about = "Random-access light-field codec")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Compress a manifest-described light field.
    Encode {
        manifest: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Decode every image to PNG plus a manifest.
    Decode {
        stream: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Stop at this tree level (0 = full quality).
        #[arg(long, default_value_t = 0)]
        level: u8,
        /// Manifest supplying camera positions and slab geometry.
        #[arg(long)]
        geometry: Option<PathBuf>,
    },
    /// Render a novel view.
    Render {
        stream: PathBuf,
        /// `x,y,z` for an eye looking through the full image-plane window, or
        /// `x,y,z,lx,ly,lz,fov_deg` for a pinhole camera.
        #[arg(long, allow_hyphen_values = true)]
        pose: PoseArg,
        #[arg(long)]
        size: Option<Size>,
        #[arg(long, default_value_t = 0)]
        level: u8,
        /// Depth of the in-focus plane.
        #[arg(long, allow_hyphen_values = true)]
        focus: Option<f64>,
        #[arg(long)]
        geometry: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Rate and quality of a stream against its source.
    Stats {
        stream: PathBuf,
        #[arg(long)]
        against: PathBuf,
        #[arg(long)]
        json: bool,
        /// Fail with the verification exit code unless decoding is exact.
        #[arg(long)]
        expect_lossless: bool,
    },
    /// Encode at several values of one parameter and tabulate rate/quality.
    Sweep {
        manifest: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<u32>,
        #[arg(short, long)]
        out: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Write a procedural light field as PNGs plus a manifest.
    Synth {
        #[arg(long, default_value = "8x8")]
        grid: Size,
        #[arg(long, default_value = "64x64")]
        size: Size,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Serve the view API and viewer.
    Serve {
        stream: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        geometry: Option<PathBuf>,
        /// Directory of viewer assets served at `/`.
        #[arg(long)]
        assets: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FilterArg {
    Gaussian,
    Uniform,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RootArg {
    Png,
    Raw,
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    #[arg(long, default_value_t = 3)]
    tree_height: u8,
    #[arg(long, default_value_t = 4)]
    block_size: u8,
    #[arg(long, default_value_t = 4)]
    pixel_threshold: u16,
    #[arg(long, default_value_t = 80)]
    block_threshold: u32,
    #[arg(long, default_value_t = 2)]
    quant_shift: u8,
    #[arg(long, value_enum, default_value = "gaussian")]
    filter: FilterArg,
    #[arg(long, default_value_t = 0.7)]
    sigma: f64,
    #[arg(long, value_enum, default_value = "png")]
    root: RootArg,
    /// Shorthand for zero thresholds and no quantization.
    #[arg(long)]
    lossless: bool,
}

impl ParamArgs {
    fn params(&self) -> CliResult<EncodingParams> {
        let mut p = EncodingParams {
            tree_height: self.tree_height,
            block_size: self.block_size,
            pixel_threshold: self.pixel_threshold,
            block_threshold: self.block_threshold,
            quant_shift: self.quant_shift,
            filter: match self.filter {
                FilterArg::Gaussian => FilterSpec::gaussian(self.sigma),
                FilterArg::Uniform => FilterSpec::uniform(),
            },
            root_codec: match self.root {
                RootArg::Png => CodecId::Png,
                RootArg::Raw => CodecId::Raw,
            },
        };
        if self.lossless {
            p.pixel_threshold = 0;
            p.block_threshold = 0;
            p.quant_shift = 0;
        }
        p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy)]
struct Size(usize, usize);

impl FromStr for Size {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(['x', 'X']).ok_or("expected WxH")?;
        let parse = |v: &str| v.trim().parse::<usize>().ok().filter(|&n| n > 0).ok_or("expected WxH");
        Ok(Size(parse(a)?, parse(b)?))
    }
}

#[derive(Debug, Clone, Copy)]
struct PoseArg {
    eye: [f64; 3],
    look: Option<([f64; 3], f64)>,
}

impl FromStr for PoseArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v: Vec<f64> = s
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err("pose components must be finite".into());
        }
        match v.len() {
            3 => Ok(PoseArg { eye: [v[0], v[1], v[2]], look: None }),
            7 => Ok(PoseArg { eye: [v[0], v[1], v[2]], look: Some(([v[3], v[4], v[5]], v[6])) }),
            _ => Err("expected x,y,z or x,y,z,lx,ly,lz,fov".into()),
        }
    }
}

fn read_stream(path: &Path) -> CliResult<DecoderState> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(DecoderState::init(bytes, &StdCodecs)?)
}

fn slab_for(state: &DecoderState, geometry: Option<&Path>) -> CliResult<LightSlab> {
    let (sc, tc) = state.grid_dims();
    let (w, h) = state.image_dims();
    match geometry {
        None => Ok(LightSlab::regular(sc, tc, w, h)),
        Some(p) => {
            let m = read_manifest(p)?;
            if (m.s_count, m.t_count) != (sc, tc) {
                return Err(CliError::Verification(format!(
                    "geometry manifest is {}x{}, stream is {sc}x{tc}",
                    m.s_count, m.t_count
                )));
            }
            Ok(m.slab(w, h)?)
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.cmd {
        Cmd::Encode { manifest, out, params } => {
            let p = params.params()?;
            let lf = load_manifest(&manifest)?;
            let start = Instant::now();
            let (stream, report) = compress(&lf, &p, &StdCodecs)?;
            write_file(&out, &stream)?;
            println!(
                "{} bytes, {:.4} bpp (Y {:.4} Co {:.4} Cg {:.4}), present blocks per level {:?}, {:.2?}",
                report.stream_bytes,
                report.bpp_total,
                report.bpp_channels[0],
                report.bpp_channels[1],
                report.bpp_channels[2],
                report.present_per_level,
                start.elapsed()
            );
        }
        Cmd::Decode { stream, out, level, geometry } => {
            let state = read_stream(&stream)?;
            if level > state.tree_height() {
                return Err(CliError::Usage(format!("level {level} exceeds tree height {}", state.tree_height())));
            }
            let slab = slab_for(&state, geometry.as_deref())?;
            let mut lf = decode_all(&state, level)?;
            let (sc, tc) = state.grid_dims();
            if let Some(g) = geometry.as_deref() {
                let m = read_manifest(g)?;
                let mut pos = rlfc_core::lf::regular_positions(sc, tc);
                for e in &m.images {
                    if let Some(p) = e.position {
                        pos[e.t * sc + e.s] = p;
                    }
                }
                lf = rlfc_core::LightFieldGrid::with_layout(sc, tc, lf.images, pos, slab.geometry)?;
            }
            let path = export_grid(&lf, &out)?;
            println!("wrote {} images and {}", sc * tc, path.display());
        }
        Cmd::Render { stream, pose, size, level, focus, geometry, out } => {
            let state = read_stream(&stream)?;
            if level > state.tree_height() {
                return Err(CliError::Usage(format!("level {level} exceeds tree height {}", state.tree_height())));
            }
            let slab = slab_for(&state, geometry.as_deref())?;
            let Size(w, h) = size.unwrap_or(Size(slab.width, slab.height));
            let projection = match pose.look {
                None => Projection::Window(slab.geometry.image_plane_extent),
                Some((look, fov_y)) => Projection::Perspective { look, up: [0.0, 1.0, 0.0], fov_y },
            };
            let cam = CameraPose { eye: pose.eye, projection, width: w, height: h };
            cam.validate(&slab).map_err(|e| CliError::Usage(e.to_string()))?;
            let opts = RenderOptions { stop_level: level, focal_z: focus, ..Default::default() };
            let r = render_view(&state, &slab, &cam, &opts)?;
            write_file(&out, &encode_rgb(&r.image))?;
            println!("{w}x{h} view, {} blocks decoded", r.decoded_blocks);
        }
        Cmd::Stats { stream, against, json, expect_lossless } => {
            let state = read_stream(&stream)?;
            let reference = load_manifest(&against)?;
            let q = quality(&state, &reference)?;
            let row = QualityRow::from(&q);
            if json {
                println!("{}", serde_json::to_string_pretty(&row).expect("plain struct"));
            } else {
                write_csv(&[row], std::io::stdout()).map_err(|e| CliError::Format(e.to_string()))?;
            }
            if expect_lossless && q.mse.iter().any(|&m| m != 0.0) {
                return Err(CliError::Verification(format!("decoded light field differs, MSE {:?}", q.mse)));
            }
        }
        Cmd::Sweep { manifest, param, values, out, params } => {
            let param = SweepParam::parse(&param).ok_or_else(|| {
                CliError::Usage(format!("unknown parameter {param}, expected one of {:?}", SweepParam::NAMES))
            })?;
            let spec = SweepSpec::new(param, values, params.params()?)?;
            let lf = load_manifest(&manifest)?;
            let rows = run_sweep(&lf, &spec, &StdCodecs)?;
            let file = fs::File::create(&out).map_err(|e| CliError::io(&out, e))?;
            write_csv(&rows, file).map_err(|e| CliError::Format(e.to_string()))?;
            write_csv(&rows, std::io::stdout()).map_err(|e| CliError::Format(e.to_string()))?;
        }
        Cmd::Synth { grid, size, seed, out } => {
            let spec = SyntheticSpec { s_count: grid.0, t_count: grid.1, width: size.0, height: size.1, seed };
            let lf = synthesize_lightfield(&spec)?;
            let path = export_grid(&lf, &out)?;
            println!("wrote {}", path.display());
        }
        Cmd::Serve { stream, port, host, geometry, assets } => {
            let state = read_stream(&stream)?;
            let slab = slab_for(&state, geometry.as_deref())?;
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .map_err(|_| CliError::Usage(format!("bad address {host}:{port}")))?;
            let mut app = AppState::new(state, slab);
            app.assets = assets;
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::io("tokio runtime", e))?;
            eprintln!("listening on http://{addr}");
            rt.block_on(serve(Arc::new(app), addr)).map_err(|e| CliError::io(addr.to_string(), e))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rlfc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
