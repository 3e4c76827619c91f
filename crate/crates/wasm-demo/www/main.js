import init, { legendre_curve, separation_table, polar_histograms } from "./pkg/sphere_metrics_demo.js";

const num = (id) => Number(document.getElementById(id).value);

function guard(errId, f) {
  const err = document.getElementById(errId);
  err.textContent = "";
  try {
    f();
  } catch (e) {
    err.textContent = String(e.message ?? e);
  }
}

function axes(ctx, w, h, pad, yLo, yHi) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  const y0 = h - pad - ((0 - yLo) / (yHi - yLo)) * (h - 2 * pad);
  ctx.moveTo(pad, y0);
  ctx.lineTo(w - pad, y0);
  ctx.moveTo(w / 2, pad);
  ctx.lineTo(w / 2, h - pad);
  ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.fillText("-1", pad, h - 4);
  ctx.fillText("1", w - pad - 6, h - 4);
  ctx.fillText(yHi.toPrecision(3), 2, pad);
  ctx.fillText(yLo.toPrecision(3), 2, h - pad);
}

function plotCurve() {
  const k = num("curve-k"), d = num("curve-d");
  const ys = legendre_curve(k, d, 600);
  const canvas = document.getElementById("curve-canvas");
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 24;
  let lo = Math.min(...ys), hi = Math.max(...ys);
  if (hi - lo < 1e-12) { lo -= 1; hi += 1; }
  axes(ctx, w, h, pad, lo, hi);
  ctx.strokeStyle = "#1f5fa8";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ys.forEach((y, i) => {
    const px = pad + (i / (ys.length - 1)) * (w - 2 * pad);
    const py = h - pad - ((y - lo) / (hi - lo)) * (h - 2 * pad);
    i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
  });
  ctx.stroke();
  ctx.lineWidth = 1;
}

function fillTable() {
  const rows = separation_table(num("table-k"), num("table-lo"), num("table-hi"), num("table-alpha"));
  const table = document.getElementById("table-out");
  const fmt = (v) => (Math.abs(v) >= 1e6 || (Math.abs(v) < 1e-3 && v !== 0) ? v.toExponential(4) : v.toPrecision(6));
  let html = "<tr><th>d</th><th>N<sub>k,d</sub></th><th>F1 IPM</th><th>F2 IPM</th><th>F1/F2 = √N</th></tr>";
  for (let i = 0; i < rows.length; i += 5) {
    html += `<tr><td>${rows[i]}</td><td>${rows[i + 1]}</td>` +
      [2, 3, 4].map((j) => `<td>${fmt(rows[i + j])}</td>`).join("") + "</tr>";
  }
  table.innerHTML = html;
}

function plotHistograms() {
  const bins = 60;
  const v = polar_histograms(num("hist-k"), num("hist-d"), num("hist-n"), bins, BigInt(num("hist-seed")));
  const mu = v.slice(0, bins), nu = v.slice(bins, 2 * bins), exact = v.slice(2 * bins);
  const canvas = document.getElementById("hist-canvas");
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 24;
  const hi = Math.max(...mu, ...nu, ...exact) * 1.05 || 1;
  axes(ctx, w, h, pad, 0, hi);
  const bw = (w - 2 * pad) / bins;
  const y = (p) => h - pad - (p / hi) * (h - 2 * pad);
  for (let i = 0; i < bins; i++) {
    ctx.fillStyle = "rgba(31,95,168,0.55)";
    ctx.fillRect(pad + i * bw, y(mu[i]), bw - 1, h - pad - y(mu[i]));
    ctx.fillStyle = "rgba(230,120,20,0.55)";
    ctx.fillRect(pad + i * bw, y(nu[i]), bw - 1, h - pad - y(nu[i]));
  }
  ctx.strokeStyle = "#111";
  ctx.beginPath();
  exact.forEach((p, i) => {
    const px = pad + (i + 0.5) * bw;
    i === 0 ? ctx.moveTo(px, y(p)) : ctx.lineTo(px, y(p));
  });
  ctx.stroke();
}

await init();
document.getElementById("curve-go").onclick = () => guard("curve-err", plotCurve);
document.getElementById("table-go").onclick = () => guard("table-err", fillTable);
document.getElementById("hist-go").onclick = () => guard("hist-err", plotHistograms);
guard("curve-err", plotCurve);
guard("table-err", fillTable);
guard("hist-err", plotHistograms);
