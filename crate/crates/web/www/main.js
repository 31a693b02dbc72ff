// Build with `wasm-pack build --target web --out-dir www/pkg crates/web`.
import init, { exampleProblem, analyze, plotGrid, decomposeAt } from "./pkg/qcqp_hull_web.js";

const RES = 120;
const $ = (id) => document.getElementById(id);
const canvas = $("plot");
const ctx = canvas.getContext("2d");
let problem = null;
let grid = null;

function toPixel(x1, x2) {
  const s = canvas.width / (grid.hi - grid.lo);
  return [(x1 - grid.lo) * s, canvas.height - (x2 - grid.lo) * s];
}

function toPoint(px, py) {
  const s = (grid.hi - grid.lo) / canvas.width;
  return [grid.lo + px * s, grid.lo + (canvas.height - py) * s];
}

function paint() {
  const hull = grid.tmin_hull.filter((v) => v !== null);
  const lo = Math.min(...hull), hi = Math.max(...hull);
  const cell = canvas.width / RES;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  for (let j = 0; j < RES; j++) {
    for (let i = 0; i < RES; i++) {
      const k = j * RES + i;
      const h = grid.tmin_hull[k];
      if (h === null) continue;
      const shade = Math.round(230 - 180 * (h - lo) / (hi - lo || 1));
      ctx.fillStyle = grid.tmin_d[k] !== null ? `rgb(255,${shade},${shade - 60})` : `rgb(${shade},${shade},255)`;
      ctx.fillRect(i * cell, canvas.height - (j + 1) * cell, cell + 1, cell + 1);
    }
  }
}

function draw() {
  const ex = JSON.parse(exampleProblem($("example").value, BigInt($("seed").value || 0)));
  if (ex.error) { $("report").textContent = ex.error; return; }
  problem = JSON.stringify(ex);
  const w = Number($("width").value) || 6;
  $("report").textContent = JSON.stringify(JSON.parse(analyze(problem)), null, 2);
  grid = JSON.parse(plotGrid(problem, -w, w, RES));
  if (grid.error) { $("report").textContent += "\n" + grid.error; return; }
  paint();
  $("cert").textContent = "click the plot";
}

canvas.addEventListener("click", (e) => {
  if (!grid) return;
  const r = canvas.getBoundingClientRect();
  const [x1, x2] = toPoint(e.clientX - r.left, e.clientY - r.top);
  const c = JSON.parse(decomposeAt(problem, x1, x2, Number($("lift").value) || 0));
  paint();
  if (c.error) { $("cert").textContent = c.error; return; }
  const [tx, ty] = toPixel(...c.point.x);
  ctx.strokeStyle = "#222";
  for (const p of c.points) {
    const [px, py] = toPixel(...p.x);
    ctx.beginPath(); ctx.moveTo(tx, ty); ctx.lineTo(px, py); ctx.stroke();
    ctx.beginPath(); ctx.arc(px, py, 4, 0, 2 * Math.PI); ctx.fill();
  }
  ctx.beginPath(); ctx.arc(tx, ty, 3, 0, 2 * Math.PI); ctx.stroke();
  $("cert").textContent = JSON.stringify({ point: c.point, weights: c.weights, points: c.points }, null, 2);
});

$("draw").addEventListener("click", draw);
$("example").addEventListener("change", draw);
await init();
draw();
