import init, { bernstein_curve, bernstein_bound, fejer_curve, fejer_bound, synthesize } from "./pkg/ensreach_demo.js";

const $ = (id) => document.getElementById(id);

function plot(canvas, series, { xmin, xmax, ymin, ymax }) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width;
  const h = canvas.height;
  const pad = 30;
  ctx.clearRect(0, 0, w, h);
  const sx = (x) => pad + ((x - xmin) / (xmax - xmin)) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - ymin) / (ymax - ymin)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.lineWidth = 1;
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText(ymax.toPrecision(3), 2, pad + 4);
  ctx.fillText(ymin.toPrecision(3), 2, h - pad);
  ctx.fillText(xmin.toPrecision(3), pad, h - 10);
  ctx.fillText(xmax.toPrecision(3), w - pad - 30, h - 10);

  for (const { xs, ys, color, dash } of series) {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.setLineDash(dash || []);
    ctx.beginPath();
    xs.forEach((x, i) => (i === 0 ? ctx.moveTo(sx(x), sy(ys[i])) : ctx.lineTo(sx(x), sy(ys[i]))));
    ctx.stroke();
  }
  ctx.setLineDash([]);
}

function columns(flat) {
  const xs = [], fs = [], ps = [];
  for (let i = 0; i < flat.length; i += 3) {
    xs.push(flat[i]);
    fs.push(flat[i + 1]);
    ps.push(flat[i + 2]);
  }
  return { xs, fs, ps };
}

function maxGap(fs, ps) {
  return fs.reduce((m, f, i) => Math.max(m, Math.abs(f - ps[i])), 0);
}

function drawBernstein() {
  const kink = Number($("b-kink").value);
  const n = Math.round(10 ** Number($("b-n").value));
  $("b-kink-out").textContent = kink.toFixed(2);
  $("b-n-out").textContent = n;
  const { xs, fs, ps } = columns(bernstein_curve(kink, n, 401));
  plot($("b-canvas"), [
    { xs, ys: fs, color: "#888" },
    { xs, ys: ps, color: "#c0392b" },
  ], { xmin: 0, xmax: 1, ymin: 0, ymax: Math.max(kink, 1 - kink) });
  $("b-status").textContent =
    `sup error ${maxGap(fs, ps).toExponential(3)}   bound ${bernstein_bound(kink, n).toExponential(3)}`;
}

function drawFejer() {
  const kind = Number($("f-kind").value);
  const n = Number($("f-n").value);
  $("f-n-out").textContent = n;
  const { xs, fs, ps } = columns(fejer_curve(kind, n, 721));
  plot($("f-canvas"), [
    { xs, ys: fs, color: "#888" },
    { xs, ys: ps, color: "#2471a3" },
  ], { xmin: 0, xmax: 2 * Math.PI, ymin: -1.1, ymax: 1.1 });
  $("f-status").textContent =
    `sup error ${maxGap(fs, ps).toExponential(3)}   bound ${fejer_bound(kind, n).toExponential(3)}`;
}

function runSynthesis() {
  const eps = Number($("s-eps").value);
  const shift = Number($("s-shift").value);
  const samples = Math.round(Number($("s-samples").value));
  const t0 = performance.now();
  try {
    const out = synthesize(eps, shift, samples);
    const ms = performance.now() - t0;
    const thetas = Array.from(out.thetas);
    const errors = Array.from(out.errors);
    plot($("s-canvas"), [
      { xs: thetas, ys: errors, color: "#27ae60" },
      { xs: [0, 1], ys: [eps, eps], color: "#c0392b", dash: [6, 4] },
    ], { xmin: 0, xmax: 1, ymin: 0, ymax: eps * 1.1 });
    const input = Array.from(out.input).filter((_, i) => i % 2 === 0);
    $("s-status").textContent =
      `method ${out.method}, ${input.length} steps (degree ${out.degree}), ${ms.toFixed(0)} ms\n` +
      `error ${out.achieved.toExponential(3)} on the synthesis grid, ${out.validated.toExponential(3)} worst overall\n` +
      `u = [${input.map((u) => u.toPrecision(4)).join(", ")}]`;
  } catch (e) {
    $("s-canvas").getContext("2d").clearRect(0, 0, 800, 300);
    $("s-status").textContent = `error: ${e.message ?? e}`;
  }
}

await init();
for (const id of ["b-kink", "b-n"]) $(id).addEventListener("input", drawBernstein);
for (const id of ["f-kind", "f-n"]) $(id).addEventListener("input", drawFejer);
$("s-run").addEventListener("click", runSynthesis);
drawBernstein();
drawFejer();
runSynthesis();
