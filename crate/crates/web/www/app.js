import init, { gamma_curve, slot_snapshot, route, regime } from "./pkg/overlaynet_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function parse(text, out) {
  const v = JSON.parse(text);
  if (v.error) {
    out.textContent = v.error;
    out.className = "out err";
    return null;
  }
  out.className = "out";
  return v;
}

// Maps region coordinates (disk of radius R at the origin) to the canvas.
function diskView(canvas, radius) {
  const ctx = canvas.getContext("2d");
  const s = (canvas.width / 2 - 8) / radius;
  const cx = canvas.width / 2, cy = canvas.height / 2;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.arc(cx, cy, radius * s, 0, 2 * Math.PI);
  ctx.stroke();
  return { ctx, s, at: ([x, y]) => [cx + x * s, cy - y * s] };
}

function dot(ctx, [x, y], r, color) {
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(x, y, r, 0, 2 * Math.PI);
  ctx.fill();
}

function plotGamma() {
  const out = $("g-out");
  const v = parse(gamma_curve(num("g-lambda"), num("g-beta"), 60), out);
  $("g-regime").textContent = regime(num("g-beta"));
  if (!v) return;
  const c = $("g-canvas"), ctx = c.getContext("2d");
  const pad = 40, w = c.width - 2 * pad, h = c.height - 2 * pad;
  const X = (a) => pad + (a / 1.5) * w, Y = (g) => pad + (1 - g) * h;
  ctx.clearRect(0, 0, c.width, c.height);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w, h);
  ctx.fillStyle = "#444";
  ctx.fillText("α = R_D / Rr_p", pad + w / 2 - 30, c.height - 10);
  for (const t of [0, 0.5, 1, 1.5]) ctx.fillText(t.toString(), X(t) - 6, pad + h + 14);
  for (const t of [0, 0.5, 1]) ctx.fillText(t.toString(), 12, Y(t) + 4);
  const line = (ys, color, dash) => {
    ctx.strokeStyle = color;
    ctx.setLineDash(dash);
    ctx.beginPath();
    v.alpha.forEach((a, i) => (i ? ctx.lineTo(X(a), Y(ys[i])) : ctx.moveTo(X(a), Y(ys[i]))));
    ctx.stroke();
    ctx.setLineDash([]);
  };
  line(v.lower, "#aaa", [4, 3]);
  line(v.upper, "#aaa", [4, 3]);
  line(v.limit, "#c60", [2, 2]);
  line(v.gamma, "#06c", []);
  const last = v.gamma.length - 1;
  out.textContent =
    `λ_s = ${v.lambda_s.toFixed(0)}\n` +
    `γ(0) = ${v.gamma[0].toFixed(4)}   γ(1.5) = ${v.gamma[last].toFixed(4)}\n` +
    "blue: γ   grey: bracket   orange: large-λ limit";
}

function drawSlot() {
  const out = $("s-out");
  const v = parse(slot_snapshot(num("s-lambda"), num("s-beta"), num("s-alpha"), num("s-seed")), out);
  if (!v) return;
  const { ctx, s, at } = diskView($("s-canvas"), v.region_radius);
  const colors = ["#f3d3b0", "#b77", "#e80"];
  for (const [x, y, st] of v.secondary) dot(ctx, at([x, y]), st === 2 ? 2.5 : 1.5, colors[st]);
  for (const [x, y, t] of v.primary) {
    const p = at([x, y]);
    dot(ctx, p, t ? 3.5 : 2, t ? "#04a" : "#9bd");
    if (t && v.r_d > 0) {
      ctx.strokeStyle = "rgba(0,64,170,0.25)";
      ctx.beginPath();
      ctx.arc(p[0], p[1], v.r_d * s, 0, 2 * Math.PI);
      ctx.stroke();
    }
  }
  for (const l of v.links) {
    ctx.strokeStyle = l.ok ? (l.tier === "primary" ? "#04a" : "#e80") : "rgba(200,0,0,0.5)";
    ctx.beginPath();
    ctx.moveTo(...at(l.from));
    ctx.lineTo(...at(l.to));
    ctx.stroke();
  }
  out.textContent =
    `primary:   ${v.primary.length} nodes, ${v.primary_transmitters} transmitting, ${v.primary_successes} links received\n` +
    `secondary: ${v.secondary.length} nodes, ${v.secondary_transmitters} transmitting, ` +
    `${v.secondary_sensed} silenced by sensing, ${v.secondary_successes} links received\n` +
    `q_p = ${v.q_p.toExponential(3)}  q_s = ${v.q_s.toExponential(3)}  R_D = ${v.r_d.toFixed(4)}\n` +
    "red links failed";
}

function drawRoute() {
  const out = $("r-out");
  const v = parse(route(num("r-lambda"), num("r-seed")), out);
  if (!v) return;
  const { ctx, s, at } = diskView($("r-canvas"), v.region_radius);
  for (const p of v.nodes) dot(ctx, at(p), 1.2, "#9bd");
  ctx.strokeStyle = "#04a";
  ctx.beginPath();
  v.path.forEach((p, i) => (i ? ctx.lineTo(...at(p)) : ctx.moveTo(...at(p))));
  ctx.stroke();
  for (const p of v.path) dot(ctx, at(p), 2.5, "#04a");
  dot(ctx, at(v.source), 5, "#0a0");
  const d = at(v.destination);
  dot(ctx, d, 5, "#c00");
  ctx.strokeStyle = "rgba(200,0,0,0.4)";
  ctx.beginPath();
  ctx.arc(d[0], d[1], v.rr * s, 0, 2 * Math.PI);
  ctx.stroke();
  const mean = v.mean_progress === null ? "n/a" : v.mean_progress.toFixed(4);
  out.textContent =
    `S-D distance ${v.distance.toFixed(3)}, ${v.hops} hops, ${v.converged ? "delivered" : "stuck"}\n` +
    `mean progress per hop ${mean}, half-disk mean 4Rr/3π = ${v.half_disk_mean.toFixed(4)}`;
}

await init();
$("g-run").onclick = plotGamma;
$("s-run").onclick = drawSlot;
$("r-run").onclick = drawRoute;
plotGamma();
drawSlot();
drawRoute();
