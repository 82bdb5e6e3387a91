// Demo page wiring: reads the sliders, calls into the wasm module and
// redraws the two canvases. No framework, no build step beyond
// wasm-bindgen's `--target web` output in ./pkg.

let wasm;
try {
  wasm = await import("./pkg/d2dse_wasm.js");
  await wasm.default();
} catch (e) {
  document.getElementById("load-error").hidden = false;
  throw e;
}

const $ = (id) => document.getElementById(id);
const LAMBDA_MIN = 10, LAMBDA_MAX = 5000, POINTS = 120;

function params() {
  return JSON.stringify({
    n: Number($("n").value),
    sigma_db: Number($("sigma").value),
    pair_m: Number($("pair").value),
  });
}

function paramsWithN(n) {
  return JSON.stringify({
    n,
    sigma_db: Number($("sigma").value),
    pair_m: Number($("pair").value),
  });
}

// --- tiny canvas plot helper (log-x line chart) ---------------------------

function makePlot(canvas, xLabel, yLabel) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height;
  const m = { l: 62, r: 16, t: 14, b: 40 };
  const fg = matchMedia("(prefers-color-scheme: dark)").matches ? "#ddd" : "#222";

  function clear(xmin, xmax, ymin, ymax) {
    ctx.clearRect(0, 0, W, H);
    ctx.strokeStyle = fg; ctx.fillStyle = fg; ctx.lineWidth = 1;
    ctx.font = "12px system-ui";
    const X = (x) => m.l + (Math.log10(x) - Math.log10(xmin)) /
      (Math.log10(xmax) - Math.log10(xmin)) * (W - m.l - m.r);
    const Y = (y) => H - m.b - (y - ymin) / (ymax - ymin) * (H - m.t - m.b);
    ctx.strokeRect(m.l, m.t, W - m.l - m.r, H - m.t - m.b);
    // x ticks at powers of ten and halfway points
    for (let d = Math.ceil(Math.log10(xmin)); d <= Math.floor(Math.log10(xmax)); d++) {
      for (const mult of [1, 2, 5]) {
        const v = mult * 10 ** d;
        if (v < xmin || v > xmax) continue;
        ctx.beginPath(); ctx.moveTo(X(v), H - m.b); ctx.lineTo(X(v), H - m.b + 5); ctx.stroke();
        ctx.textAlign = "center";
        ctx.fillText(v.toLocaleString(), X(v), H - m.b + 18);
      }
    }
    const span = ymax - ymin;
    const step = span / 4;
    for (let i = 0; i <= 4; i++) {
      const v = ymin + i * step;
      ctx.beginPath(); ctx.moveTo(m.l - 5, Y(v)); ctx.lineTo(m.l, Y(v)); ctx.stroke();
      ctx.textAlign = "right";
      ctx.fillText(v.toFixed(2), m.l - 8, Y(v) + 4);
    }
    ctx.textAlign = "center";
    ctx.fillText(xLabel, m.l + (W - m.l - m.r) / 2, H - 6);
    ctx.save();
    ctx.translate(14, m.t + (H - m.t - m.b) / 2); ctx.rotate(-Math.PI / 2);
    ctx.fillText(yLabel, 0, 0);
    ctx.restore();
    return { X, Y };
  }

  function line(axes, xs, ys, color, dash = []) {
    ctx.save();
    ctx.strokeStyle = color; ctx.lineWidth = 2; ctx.setLineDash(dash);
    ctx.beginPath();
    let started = false;
    for (let i = 0; i < xs.length; i++) {
      if (ys[i] == null) { started = false; continue; }
      const px = axes.X(xs[i]), py = axes.Y(ys[i]);
      if (!started) { ctx.moveTo(px, py); started = true; } else ctx.lineTo(px, py);
    }
    ctx.stroke();
    ctx.restore();
  }

  function label(axes, x, y, text, color) {
    ctx.save();
    ctx.fillStyle = color; ctx.textAlign = "left"; ctx.font = "12px system-ui";
    ctx.fillText(text, axes.X(x) + 6, axes.Y(y) - 6);
    ctx.restore();
  }

  return { clear, line, label };
}

const densityPlot = makePlot($("fig-density"), "D2D density, km⁻²", "CUE rate, bits/s/Hz");
const targetPlot = makePlot($("fig-target"), "D2D ASE target, bits/s/Hz/km²", "CUE rate limit, bits/s/Hz");

// --- redraws ---------------------------------------------------------------

function drawDensityFigure() {
  const r0d = Number($("r0d").value);
  const data = JSON.parse(wasm.lambda_sweep(params(), r0d, LAMBDA_MIN, LAMBDA_MAX, POINTS));
  if (data.error) { console.warn(data.error); return; }
  const ys = data.se_bpshz;
  const finite = ys.filter((y) => y != null);
  if (!finite.length) return;
  const lim = data.dense_limit_se_bpshz;
  const ymin = Math.min(...finite) - 0.08, ymax = (lim ?? Math.max(...finite)) + 0.08;
  const axes = densityPlot.clear(LAMBDA_MIN, LAMBDA_MAX, ymin, ymax);
  if (lim != null) {
    densityPlot.line(axes, [LAMBDA_MIN, LAMBDA_MAX], [lim, lim], "#888", [6, 4]);
    densityPlot.label(axes, LAMBDA_MIN, lim, `dense limit ${lim.toFixed(3)}`, "#888");
  }
  densityPlot.line(axes, data.lambda_per_km2, ys, "#1c7ed6");
  if (data.min_feasible_lambda_per_km2 > LAMBDA_MIN) {
    densityPlot.label(axes, data.min_feasible_lambda_per_km2, ymin + 0.06,
      `feasible beyond ${data.min_feasible_lambda_per_km2.toFixed(1)} km⁻²`, "#c33");
  }
}

function drawTargetFigure() {
  // Current antenna count next to its doubling: same curve shape, shifted
  // right by the ratio law.
  const n = Number($("n").value);
  let axes = null;
  for (const [count, color] of [[n, "#1c7ed6"], [2 * n, "#e8590c"]]) {
    const data = JSON.parse(wasm.ase_sweep(paramsWithN(count), 2, 200, POINTS));
    if (data.error) { console.warn(data.error); return; }
    if (!axes) axes = targetPlot.clear(2, 200, 0, 3.1);
    targetPlot.line(axes, data.r0d_per_km2, data.dense_limit_se_bpshz, color);
    targetPlot.label(axes, 2.3, data.dense_limit_se_bpshz[0] ?? 3, `N = ${count}`, color);
  }
  // marker at the current target
  const r0d = Number($("r0d").value);
  targetPlot.line(axes, [r0d, r0d], [0, 0.15], "#888");
}

function refreshOperatingPoint(mcTrials = 0) {
  const lambda = Math.round(10 ** Number($("lambda").value));
  $("lambda-out").value = lambda.toLocaleString();
  const r0d = Number($("r0d").value);
  const seed = Number($("seed").value);
  const data = JSON.parse(wasm.operating_point(params(), lambda, r0d, mcTrials, seed));
  if (data.error) { console.warn(data.error); return; }
  const fmt = (v, unit = "", digits = 4) => (v == null ? "—" : `${v.toFixed(digits)}${unit}`);
  $("op-kappa").textContent = data.feasible ? fmt(data.kappa) : "infeasible here";
  $("op-se").textContent = fmt(data.se_bpshz, " bits/s/Hz");
  $("op-gamma").textContent = fmt(data.gamma_d_db, " dB", 2);
  $("op-pd").textContent = fmt(data.pd_dbm, " dBm", 2);
  $("op-ceiling").textContent = `${data.ceiling_ase_per_km2.toFixed(2)} bits/s/Hz/km²`;
  if (data.mc) {
    $("mc-result").textContent =
      `Monte Carlo (${data.mc.trials} trials, seed ${data.mc.seed}):\n` +
      `simulated CUE rate ${data.mc.cue_se_bpshz.toFixed(4)} ± ${data.mc.cue_se_stderr.toFixed(4)} bits/s/Hz ` +
      `(closed form ${fmt(data.se_bpshz)})\n` +
      `realized D2D ASE ${data.mc.realized_ase_per_km2.toFixed(2)} ± ${data.mc.realized_ase_stderr.toFixed(2)} ` +
      `bits/s/Hz/km² (target ${r0d})`;
  } else if (!data.feasible) {
    $("mc-result").textContent =
      "This density cannot carry the target; raise the density or lower the target.";
  }
}

function refreshAll() {
  $("r0d-out").value = $("r0d").value;
  $("sigma-out").value = $("sigma").value;
  $("pair-out").value = $("pair").value;
  drawDensityFigure();
  drawTargetFigure();
  refreshOperatingPoint();
}

for (const id of ["n", "r0d", "sigma", "pair", "lambda"]) {
  $(id).addEventListener("input", refreshAll);
}
$("run-mc").addEventListener("click", () => {
  refreshOperatingPoint(Number($("trials").value));
});

refreshAll();
