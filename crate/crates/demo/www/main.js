import init, { spectrum, gamma } from "./pkg/heavychain_demo.js";

const $ = (id) => document.getElementById(id);

function fail(el, e) {
  el.className = "out err";
  el.textContent = String(e);
}

function drawSpectrum(s) {
  const c = $("hist");
  const g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  const ev = s.eigenvalues;
  const hi = Math.max(ev[ev.length - 1], s.edge_high) * 1.05;
  const bins = 60;
  const counts = new Array(bins).fill(0);
  for (const v of ev) counts[Math.min(bins - 1, Math.floor((v / hi) * bins))]++;
  const top = Math.max(...counts);
  const w = c.width / bins;
  g.fillStyle = "#4a78b5";
  counts.forEach((k, i) => {
    const h = (k / top) * (c.height - 20);
    g.fillRect(i * w + 1, c.height - h, w - 2, h);
  });
  g.strokeStyle = "#c0392b";
  g.setLineDash([5, 4]);
  for (const edge of [s.edge_low, s.edge_high]) {
    const x = (edge / hi) * c.width;
    g.beginPath();
    g.moveTo(x, 0);
    g.lineTo(x, c.height);
    g.stroke();
  }
  g.setLineDash([]);
}

function sample() {
  const out = $("spec-out");
  try {
    const s = JSON.parse(spectrum($("law").value, +$("n").value, +$("bign").value, +$("seed").value));
    drawSpectrum(s);
    const ev = s.eigenvalues;
    let text =
      `eigenvalues in [${ev[0].toFixed(4)}, ${ev[ev.length - 1].toFixed(4)}], ` +
      `limiting edges [${s.edge_low.toFixed(4)}, ${s.edge_high.toFixed(4)}]\n` +
      `‖Σ_N − I‖ = ${s.deviation.toFixed(4)}`;
    if (s.all_hit !== null) text += `\nP(all coordinates hit) = ${s.all_hit.toExponential(3)}`;
    out.className = "out";
    out.textContent = text;
  } catch (e) {
    fail(out, e);
  }
}

const points = [];
let view = null;

function toPlane(p) {
  const c = $("plane");
  return [(p[0] * 0.5 + 0.5) * c.width, (0.5 - p[1] * 0.5) * c.height];
}

function drawPlane() {
  const c = $("plane");
  const g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  if (view) {
    const level = view.levels[Math.min(+$("level").value, view.levels.length - 1)];
    g.strokeStyle = "#999";
    points.forEach((p, i) => {
      const [x0, y0] = toPlane(p);
      const [x1, y1] = toPlane(level[i]);
      g.beginPath();
      g.moveTo(x0, y0);
      g.lineTo(x1, y1);
      g.stroke();
    });
    g.fillStyle = "#c0392b";
    for (const ctr of level) {
      const [x, y] = toPlane(ctr);
      g.fillRect(x - 5, y - 5, 10, 10);
    }
  }
  g.fillStyle = "#222";
  for (const p of points) {
    const [x, y] = toPlane(p);
    g.beginPath();
    g.arc(x, y, 4, 0, 2 * Math.PI);
    g.fill();
  }
}

function update() {
  const out = $("gamma-out");
  if (points.length === 0) {
    view = null;
    out.textContent = "";
    drawPlane();
    return;
  }
  try {
    view = JSON.parse(gamma(JSON.stringify(points), +$("beta").value));
    $("level").max = String(view.levels.length - 1);
    let text = `greedy chain: ${view.greedy.toFixed(4)}`;
    if (view.bruteforce !== null) text += `\nexact γ: ${view.bruteforce.toFixed(4)}`;
    out.className = "out";
    out.textContent = text;
  } catch (e) {
    view = null;
    fail(out, e);
  }
  drawPlane();
}

$("plane").addEventListener("click", (ev) => {
  const c = $("plane");
  const r = c.getBoundingClientRect();
  const x = ((ev.clientX - r.left) / c.width - 0.5) * 2;
  const y = (0.5 - (ev.clientY - r.top) / c.height) * 2;
  points.push([x, y]);
  update();
});
$("clear").addEventListener("click", () => {
  points.length = 0;
  update();
});
$("beta").addEventListener("change", update);
$("level").addEventListener("input", drawPlane);
$("sample").addEventListener("click", sample);

await init();
sample();
